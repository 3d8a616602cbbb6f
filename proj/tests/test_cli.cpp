#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "resolvent/cli.hpp"
#include "resolvent/errors.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = EXAMPLES_CFG_DIR;

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "resolvent_cli_test" / name;
    fs::remove_all(dir);
    return dir;
}

struct Result {
    int code;
    std::string output;
};

Result cli(const std::string& command, const std::string& config, const fs::path& out, const std::string& extra = "")
{
    const fs::path log = out.string() + ".log";
    fs::create_directories(log.parent_path());
    const std::string line = std::string(RESOLVENT_CLI_PATH) + " " + command + " --config " +
                             (kConfigs / config).string() + " --out " + out.string() + " " + extra + " > " +
                             log.string() + " 2>&1";
    const int status = std::system(line.c_str());
    std::ifstream in(log);
    std::stringstream text;
    text << in.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, text.str()};
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream text;
    text << in.rdbuf();
    return text.str();
}

using Table = std::vector<std::vector<std::string>>;

Table read_csv(const fs::path& path)
{
    Table rows;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        rows.push_back(cells);
    }
    return rows;
}

std::size_t column(const Table& t, const std::string& prefix)
{
    for (std::size_t i = 0; i < t.front().size(); ++i) {
        if (t.front()[i].rfind(prefix, 0) == 0) {
            return i;
        }
    }
    FAIL("no column " << prefix);
    return 0;
}

} // namespace

TEST_CASE("config validation")
{
    using resolvent::cli::parse_run_config;
    const auto cfg = parse_run_config("bath: {builder: chain, n: 4}\nemitters:\n  - {omega0: 0.1, g: 0.2, site: 3}\n",
                                      "inline");
    CHECK(cfg.bath.n_sites() == 4);
    CHECK(cfg.energy_unit == "J");
    REQUIRE(cfg.emitters.size() == 1);
    CHECK(cfg.emitters[0].site == 3);

    CHECK_THROWS_AS(parse_run_config("bath: {builder: chain, n: 4}\nbogus: 1\n", "inline"), resolvent::ParseError);
    CHECK_THROWS_AS(parse_run_config("bath: {builder: chain, n: 4}\nemitters:\n  - {omega0: 0, g: 0.2, site: 4}\n",
                                     "inline"),
                    resolvent::ParseError);
    CHECK_THROWS_AS(parse_run_config("bath: {builder: chain, n: 4}\nemitters:\n  - {omega0: 0, g: 0.2, site: 1}\n"
                                     "  - {omega0: 0, g: 0.2, site: 1}\n",
                                     "inline"),
                    resolvent::ParseError);
    CHECK_THROWS_AS(parse_run_config("bath: {builder: chain, n: 4}\nsuite: everything\n", "inline"),
                    resolvent::ParseError);

    const Result bad = cli("spectrum", "bad_key.yaml", scratch("bad"));
    CHECK(bad.code == 2);
    CHECK(bad.output.find("omega_zero") != std::string::npos);
    CHECK(bad.output.find(":5:") != std::string::npos);

    CHECK(cli("spectrum", "missing.yaml", scratch("missing")).code == 2);
    CHECK(cli("spectrum", "ssh10.yaml", scratch("neg_delta"), "--delta -1").code == 2);
}

TEST_CASE("spectrum command")
{
    const fs::path out = scratch("spectrum_chain");
    {
        std::ofstream cfg(out.string() + ".yaml");
        cfg << "bath: {builder: chain, n: 50}\n";
    }
    const std::string line = std::string(RESOLVENT_CLI_PATH) + " spectrum --config " + out.string() + ".yaml --out " +
                             out.string() + " > /dev/null 2>&1";
    REQUIRE(std::system(line.c_str()) == 0);
    const Table spectrum = read_csv(out / "spectrum.csv");
    REQUIRE(spectrum.size() == 51);
    CHECK(spectrum[0][1] == "omega_k [J]");
    for (std::size_t i = 2; i < spectrum.size(); ++i) {
        CHECK(std::stod(spectrum[i][1]) > std::stod(spectrum[i - 1][1]));
    }

    const fs::path ssh = scratch("spectrum_ssh");
    REQUIRE(cli("spectrum", "ssh10.yaml", ssh).code == 0);
    const Table bands = read_csv(ssh / "bands.csv");
    int inner_gaps = 0;
    for (const auto& row : bands) {
        if (row[0] == "gap" && row[1] != "-inf" && row[2] != "inf") {
            ++inner_gaps;
            CHECK(std::stod(row[1]) < 0.0);
            CHECK(std::stod(row[2]) > 0.0);
        }
    }
    CHECK(inner_gaps == 1);
}

TEST_CASE("bound-states command")
{
    const fs::path jc = scratch("bs_jc");
    REQUIRE(cli("bound-states", "jaynes_cummings.yaml", jc).code == 0);
    const Table t = read_csv(jc / "bound_states.csv");
    REQUIRE(t.size() == 3);
    const std::size_t energy = column(t, "energy");
    CHECK(std::abs(std::stod(t[1][energy]) + 1.0) < 1e-12);
    CHECK(std::abs(std::stod(t[2][energy]) - 1.0) < 1e-12);
    CHECK(read_csv(jc / "bound_states_photonic.csv").size() == 3);

    const fs::path vds = scratch("bs_vds");
    REQUIRE(cli("bound-states", "chain3_vds.yaml", vds).code == 0);
    const Table v = read_csv(vds / "bound_states.csv");
    const std::size_t is_vds = column(v, "is_vds");
    int flagged = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i][is_vds] == "true") {
            ++flagged;
            CHECK(std::abs(std::stod(v[i][column(v, "energy")])) < 1e-12);
        }
    }
    CHECK(flagged == 1);

    // one state above the band; the 1D chain also binds a weak one below it
    const fs::path big = scratch("bs_chain100");
    REQUIRE(cli("bound-states", "chain100_above_band.yaml", big).code == 0);
    const Table b = read_csv(big / "bound_states.csv");
    int above = 0;
    for (std::size_t i = 1; i < b.size(); ++i) {
        above += std::stod(b[i][column(b, "energy")]) > 2.0 ? 1 : 0;
        CHECK(std::stod(b[i][column(b, "oracle_error")]) < 1e-9);
    }
    CHECK(above == 1);

    CHECK(cli("bound-states", "two_atom_effective.yaml", scratch("bs_two")).code == 2);
}

TEST_CASE("scattering command")
{
    const fs::path out = scratch("scattering");
    REQUIRE(cli("scattering", "chain49_scattering.yaml", out).code == 0);
    const Table t = read_csv(out / "scattering.csv");
    REQUIRE(t.size() == 50);
    const std::size_t node = column(t, "node_at_site");
    const std::size_t regular = column(t, "regular");
    const std::size_t residual = column(t, "residual");
    int nodal = 0;
    for (std::size_t i = 1; i < t.size(); ++i) {
        CHECK(std::stod(t[i][residual]) < 1e-6);
        if (t[i][node] == "true") {
            ++nodal;
            CHECK(t[i][regular] == "false");
            CHECK(std::stod(t[i][column(t, "atomic_re")]) == 0.0);
        }
    }
    CHECK(nodal == 24);

    const Result empty = cli("scattering", "no_emitters.yaml", scratch("scattering_empty"));
    CHECK(empty.code == 2);
    CHECK(empty.output.find("emitter") != std::string::npos);
}

TEST_CASE("effective command")
{
    const fs::path eq = scratch("effective_eq");
    REQUIRE(cli("effective", "two_atom_effective.yaml", eq).code == 0);
    const auto doc = nlohmann::json::parse(slurp(eq / "effective.json"));
    for (const auto& row : doc["decomposition"]["h_a"]["re"]) {
        for (double v : row) {
            CHECK(std::abs(v) < 1e-12);
        }
    }
    CHECK(doc["route"] == "decomposition");
    CHECK(doc["oracle_error"].get<double>() < std::pow(doc["g"].get<double>(), 4));
    const Table sweep = read_csv(eq / "effective_sweep.csv");
    REQUIRE(sweep.size() == 5);
    const std::size_t err = column(sweep, "eigenvalue_error");
    for (std::size_t i = 2; i < sweep.size(); ++i) {
        CHECK(std::stod(sweep[i][err]) > std::stod(sweep[i - 1][err]));
    }

    const fs::path a = scratch("effective_ssh_eq");
    const fs::path b = scratch("effective_ssh_ineq");
    REQUIRE(cli("effective", "ssh_equivalent.yaml", a).code == 0);
    REQUIRE(cli("effective", "ssh_inequivalent.yaml", b).code == 0);
    const auto da = nlohmann::json::parse(slurp(a / "effective.json"));
    const auto db = nlohmann::json::parse(slurp(b / "effective.json"));
    const auto offdiag = [](const nlohmann::json& d) {
        return std::hypot(d["matrix"]["re"][0][1].get<double>(), d["matrix"]["im"][0][1].get<double>());
    };
    CHECK(std::abs(offdiag(da) - offdiag(db)) > 0.1 * std::max(offdiag(da), offdiag(db)));
    CHECK(db["route"] == "residue");
    CHECK(db["decomposition"]["deviation_flagged"] == true);

    const Result in_band = cli("effective", "effective_in_band.yaml", scratch("effective_band"));
    CHECK(in_band.code == 2);
    CHECK(in_band.output.find("band") != std::string::npos);
}

TEST_CASE("compare command")
{
    const fs::path good = scratch("compare_good");
    CHECK(cli("compare", "compare_ring.yaml", good).code == 0);
    CHECK(cli("compare", "chain3_vds.yaml", scratch("compare_vds")).code == 0);
    const fs::path bad = scratch("compare_bad");
    CHECK(cli("compare", "compare_corrupted.yaml", bad).code == 1);
    const auto doc = nlohmann::json::parse(slurp(bad / "compare.json"));
    CHECK(doc["all_pass"] == false);
    const auto schema = [](const nlohmann::json& d) {
        std::vector<std::string> names;
        for (const auto& c : d["checks"]) {
            names.push_back(c["name"]);
        }
        return names;
    };
    CHECK(schema(doc) == schema(nlohmann::json::parse(slurp(good / "compare.json"))));
}

TEST_CASE("outputs are byte-identical across runs")
{
    const std::vector<std::pair<std::string, std::string>> runs{
        {"spectrum", "ssh10.yaml"},
        {"bound-states", "chain3_vds.yaml"},
        {"scattering", "chain49_scattering.yaml"},
        {"effective", "two_atom_effective.yaml"},
        {"compare", "compare_ring.yaml"},
    };
    for (const auto& [command, config] : runs) {
        const fs::path first = scratch(command + "_1");
        const fs::path second = scratch(command + "_2");
        REQUIRE(cli(command, config, first).code == 0);
        REQUIRE(cli(command, config, second).code == 0);
        for (const auto& entry : fs::directory_iterator(first)) {
            INFO(entry.path());
            CHECK(slurp(entry.path()) == slurp(second / entry.path().filename()));
        }
    }
}
