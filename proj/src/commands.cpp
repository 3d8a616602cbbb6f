#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "resolvent/cli.hpp"
#include "resolvent/errors.hpp"
#include "resolvent/multi.hpp"
#include "resolvent/oracle.hpp"

namespace resolvent::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string num(double v)
{
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

class CsvFile {
public:
    CsvFile(const fs::path& path, const std::vector<std::string>& header) : path_(path), out_(path)
    {
        if (!out_) {
            throw std::runtime_error("cannot write '" + path.string() + "'");
        }
        row(header);
    }

    void row(const std::vector<std::string>& cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out_ << (i ? "," : "") << cells[i];
        }
        out_ << '\n';
    }

private:
    fs::path path_;
    std::ofstream out_;
};

void write_json(const fs::path& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    out << text << '\n';
}

json complex_matrix(const ComplexMatrix& m)
{
    json re = json::array();
    json im = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json rr = json::array();
        json ii = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            rr.push_back(m(i, j).real());
            ii.push_back(m(i, j).imag());
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ii));
    }
    return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

json real_vector(const RealVector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

const char* flag(bool b) { return b ? "true" : "false"; }

std::string unit(const RunConfig& cfg) { return " [" + cfg.energy_unit + "]"; }

EmitterSpec single_emitter(const RunConfig& cfg, const char* command)
{
    if (cfg.emitters.size() != 1) {
        throw std::invalid_argument(std::string(command) + " needs exactly one emitter in 'emitters' (got " +
                                    std::to_string(cfg.emitters.size()) + ")");
    }
    return cfg.emitters.front();
}

EmitterArraySpec emitter_array(const RunConfig& cfg, const char* command)
{
    if (cfg.emitters.empty()) {
        throw std::invalid_argument(std::string(command) + " needs at least one emitter in 'emitters'");
    }
    return EmitterArraySpec::from_emitters(cfg.emitters);
}

/// The M oracle eigenvalues closest to omega0 among those inside gaps, ascending.
std::vector<double> oracle_doublet(const BathSpec& bath, const SpectralData& s, const BandStructure& bands,
                                   const EmitterArraySpec& arr)
{
    const oracle::Eigensystem exact = oracle::exact_eigensystem(oracle::build_full_hamiltonian(bath, arr));
    std::vector<double> in_gap = oracle::in_gap_eigenvalues(exact, s, bands);
    std::sort(in_gap.begin(), in_gap.end(), [&](double a, double b) {
        return std::abs(a - arr.omega0()) < std::abs(b - arr.omega0());
    });
    in_gap.resize(std::min(in_gap.size(), arr.size()));
    std::sort(in_gap.begin(), in_gap.end());
    return in_gap;
}

double doublet_error(const RealVector& eigenvalues, const std::vector<double>& doublet)
{
    if (static_cast<std::size_t>(eigenvalues.size()) != doublet.size()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double err = 0.0;
    for (std::size_t i = 0; i < doublet.size(); ++i) {
        err = std::max(err, std::abs(eigenvalues(static_cast<Eigen::Index>(i)) - doublet[i]));
    }
    return err;
}

} // namespace

int cmd_spectrum(const RunConfig& cfg, const fs::path& out_dir)
{
    const SpectralData s = diagonalize_bath(cfg.bath);
    const BandStructure bands = detect_bands(s, cfg.gap_factor);
    CsvFile spectrum(out_dir / "spectrum.csv", {"k", "omega_k" + unit(cfg)});
    for (Eigen::Index k = 0; k < s.eigenvalues().size(); ++k) {
        spectrum.row({std::to_string(k), num(s.eigenvalues()(k))});
    }
    CsvFile intervals(out_dir / "bands.csv", {"kind", "lower" + unit(cfg), "upper" + unit(cfg)});
    for (const Interval& b : bands.bands) {
        intervals.row({"band", num(b.lower), num(b.upper)});
    }
    for (const Interval& g : bands.gaps) {
        intervals.row({"gap", num(g.lower), num(g.upper)});
    }
    return kOk;
}

int cmd_bound_states(const RunConfig& cfg, const fs::path& out_dir)
{
    const EmitterSpec e = single_emitter(cfg, "bound-states");
    const SpectralData s = diagonalize_bath(cfg.bath);
    const BandStructure bands = detect_bands(s, cfg.gap_factor);
    const std::vector<BoundState> states = solve_dressed_bound_states(s, e, bands);
    const oracle::Eigensystem exact = oracle::exact_eigensystem(oracle::build_full_hamiltonian(cfg.bath, e));

    CsvFile table(out_dir / "bound_states.csv", {"index", "energy" + unit(cfg), "norm_factor [1]",
                                                 "atomic_amplitude [1]", "is_vds", "in_band", "oracle_error" + unit(cfg)});
    CsvFile photonic(out_dir / "bound_states_photonic.csv", {"index", "site", "re [1]", "im [1]"});
    bool ok = true;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const BoundState& b = states[i];
        const double err = (exact.values.array() - b.energy).abs().minCoeff();
        ok = ok && err <= cfg.tolerance;
        table.row({std::to_string(i), num(b.energy), num(b.norm_factor), num(b.atomic_amplitude.real()),
                   flag(b.is_vds), flag(b.in_band), num(err)});
        for (Eigen::Index x = 0; x < b.photonic.size(); ++x) {
            photonic.row({std::to_string(i), std::to_string(x), num(b.photonic(x).real()), num(b.photonic(x).imag())});
        }
    }
    return ok ? kOk : kCheckFailed;
}

int cmd_scattering(const RunConfig& cfg, const fs::path& out_dir)
{
    const EmitterSpec e = single_emitter(cfg, "scattering");
    const SpectralData s = diagonalize_bath(cfg.bath);
    const double delta = cfg.delta.value_or(default_delta(s));
    CsvFile table(out_dir / "scattering.csv", {"k", "omega_k" + unit(cfg), "atomic_re [1]", "atomic_im [1]",
                                               "node_at_site", "regular", "residual" + unit(cfg)});
    bool ok = true;
    for (std::size_t k = 0; k < s.n_modes(); ++k) {
        const ScatteringState st = dressed_scattering_state(s, e, k, delta);
        const bool node = std::abs(s.eigenvectors()(static_cast<Eigen::Index>(e.site), static_cast<Eigen::Index>(k))) <
                          1e-10;
        ok = ok && st.residual < 1e-6;
        table.row({std::to_string(k), num(st.energy), num(st.vector(0).real()), num(st.vector(0).imag()), flag(node),
                   flag(st.regular), num(st.residual)});
    }
    return ok ? kOk : kCheckFailed;
}

int cmd_effective(const RunConfig& cfg, const fs::path& out_dir)
{
    const EmitterArraySpec arr = emitter_array(cfg, "effective");
    const SpectralData s = diagonalize_bath(cfg.bath);
    const BandStructure bands = detect_bands(s, cfg.gap_factor);
    const EffectiveHamiltonian many = effective_hamiltonian_many(s, arr, bands);
    const EffectiveHamiltonian heff = arr.size() == 2 ? effective_hamiltonian_two(s, arr, bands) : many;

    const std::vector<double> doublet = oracle_doublet(cfg.bath, s, bands, arr);
    const double err = doublet_error(heff.eigenvalues, doublet);
    const double err_compact = doublet_error(many.eigenvalues, doublet);

    json doc;
    doc["energy_unit"] = cfg.energy_unit;
    doc["omega0"] = arr.omega0();
    doc["g"] = arr.g();
    doc["sites"] = arr.sites();
    std::string route = "compact";
    if (heff.decomposition) {
        route = heff.decomposition->used_residue_route ? "residue" : "decomposition";
    }
    doc["route"] = route;
    doc["matrix"] = complex_matrix(heff.matrix);
    doc["eigenvalues"] = real_vector(heff.eigenvalues);
    doc["compact_matrix"] = complex_matrix(many.matrix);
    doc["compact_eigenvalues"] = real_vector(many.eigenvalues);
    doc["single_emitter_energies"] = real_vector(heff.single_emitter_energies);
    doc["norms_squared"] = real_vector(heff.norms_squared);
    doc["gap_detuning"] = heff.gap_detuning;
    doc["approximation_quality"] = heff.approximation_quality;
    doc["spectral_route_energies"] = real_vector(many.spectral_route_energies);
    doc["oracle_doublet"] = doublet;
    doc["oracle_error"] = std::isfinite(err) ? json(err) : json(nullptr);
    doc["compact_oracle_error"] = std::isfinite(err_compact) ? json(err_compact) : json(nullptr);
    if (heff.decomposition) {
        const TwoEmitterDecomposition& d = *heff.decomposition;
        doc["decomposition"] = {
            {"asymmetry", d.asymmetry},       {"splitting", d.splitting},     {"shifted_center", d.shifted_center},
            {"beta_plus", d.beta_plus},       {"beta_minus", d.beta_minus},   {"lambda_s", d.lambda_s},
            {"lambda_a", d.lambda_a},         {"Omega_1", d.big_omega_1},     {"Omega_2", d.big_omega_2},
            {"omega_plus", d.omega_plus},     {"omega_minus", d.omega_minus}, {"h_s", complex_matrix(d.h_s)},
            {"h_a", complex_matrix(d.h_a)},   {"residue_route", complex_matrix(d.residue_route)},
            {"deviation", d.deviation},       {"deviation_flagged", d.deviation_flagged},
        };
    }
    write_json(out_dir / "effective.json", doc.dump(2));

    if (!cfg.g_sweep.empty()) {
        CsvFile sweep(out_dir / "effective_sweep.csv",
                      {"g" + unit(cfg), "eigenvalue_error" + unit(cfg), "approximation_quality [1]"});
        const std::vector<EffectiveHamiltonian> runs =
            effective_hamiltonian_sweep(s, arr.omega0(), arr.sites(), cfg.g_sweep, bands);
        for (std::size_t i = 0; i < runs.size(); ++i) {
            const EmitterArraySpec a(arr.omega0(), cfg.g_sweep[i], arr.sites());
            const double e = doublet_error(runs[i].eigenvalues, oracle_doublet(cfg.bath, s, bands, a));
            sweep.row({num(cfg.g_sweep[i]), num(e), num(runs[i].approximation_quality)});
        }
    }
    return kOk;
}

int cmd_compare(const RunConfig& cfg, const fs::path& out_dir)
{
    const EmitterArraySpec arr = emitter_array(cfg, "compare");
    oracle::CompareOptions options;
    options.suite = cfg.suite;
    options.seed = cfg.seed;
    options.n_z = cfg.n_z;
    options.gap_factor = cfg.gap_factor;
    options.f_corruption = cfg.corrupt_f;
    const oracle::ComparisonReport report = oracle::compare(cfg.bath, arr, options);
    write_json(out_dir / "compare.json", report.to_json());
    return report.all_pass() ? kOk : kCheckFailed;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Resolvent-based solver for emitters coupled to photonic lattices"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::optional<double> delta;
    std::optional<double> tol;

    struct Entry {
        const char* name;
        const char* help;
        int (*fn)(const RunConfig&, const fs::path&);
    };
    const Entry entries[] = {
        {"spectrum", "bath eigenvalues and band/gap detection", cmd_spectrum},
        {"bound-states", "dressed bound states of one emitter", cmd_bound_states},
        {"scattering", "dressed scattering states of one emitter", cmd_scattering},
        {"effective", "weak-coupling effective Hamiltonian of an emitter array", cmd_effective},
        {"compare", "cross-check against dense diagonalization", cmd_compare},
    };
    std::vector<CLI::App*> subs;
    for (const Entry& e : entries) {
        CLI::App* sub = app.add_subcommand(e.name, e.help);
        sub->add_option("--config", config_path, "run config (YAML or JSON)")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--delta", delta, "omega^+ regularizer");
        sub->add_option("--tol", tol, "oracle tolerance");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        RunConfig cfg = load_run_config(config_path);
        if (delta) {
            if (!(*delta > 0.0)) {
                throw std::invalid_argument("--delta must be positive");
            }
            cfg.delta = delta;
        }
        if (tol) {
            if (!(*tol > 0.0)) {
                throw std::invalid_argument("--tol must be positive");
            }
            cfg.tolerance = *tol;
        }
        fs::create_directories(out_dir);
        for (std::size_t i = 0; i < subs.size(); ++i) {
            if (subs[i]->parsed()) {
                const int code = entries[i].fn(cfg, out_dir);
                if (code == kCheckFailed) {
                    err << entries[i].name << ": checks failed (see output in " << out_dir << ")\n";
                }
                return code;
            }
        }
    } catch (const ParseError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const RegimeError& e) {
        err << "invalid regime: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kCheckFailed;
    }
    return kConfigError;
}

} // namespace resolvent::cli
