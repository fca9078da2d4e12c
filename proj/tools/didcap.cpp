#include <didcap/didcap.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Options {
    std::optional<std::string> p, pi, pd;
    std::string L = "2";
    bool L_given = false;
    double tol = 1e-9;
    bool bitsym = true;
    double alpha = 0.5;
    std::size_t n = 1'000'000;
    std::size_t samples = 10;
    std::uint64_t seed = 1;
    std::string out;
    std::string pivot;
    std::string suite = "all";
    std::string quantities = "lower,iud_lower,genie,upper,expansion";
    bool bsign = false;
    std::string delta1 = "-0.25:0.05:0.75";
    std::string delta2 = "-0.25:0.05:0.25";
    double c = 1.0;
    long k_max = 2000;
};

class Output {
public:
    explicit Output(const std::string& path)
    {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw didcap::domain_error("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

didcap::SweepConfig make_config(const Options& o, bool needs_grid = true)
{
    didcap::SweepConfig cfg;
    if (needs_grid) cfg.grid = didcap::make_grid(o.p, o.pi, o.pd);
    cfg.L = didcap::parse_int_list(o.L);
    cfg.tol = o.tol;
    cfg.bitsym = o.bitsym;
    cfg.alpha = o.alpha;
    cfg.n = o.n;
    cfg.samples = o.samples;
    cfg.seed = o.seed;
    cfg.suite = o.suite;
    if (!(o.tol > 0.0)) throw didcap::domain_error("--tol must be positive");
    if (!(o.alpha >= 0.0 && o.alpha <= 1.0)) throw didcap::domain_error("--alpha must lie in [0,1]");
    return cfg;
}

int emit_rows(const Options& o, const std::vector<didcap::CsvRow>& rows)
{
    Output out(o.out);
    didcap::write_csv(out.stream(), rows);
    if (!o.pivot.empty()) {
        Output piv(o.pivot);
        didcap::write_pivot(piv.stream(), rows);
    }
    for (const auto& r : rows)
        if (!r.converged) return kExitFailure;
    return kExitOk;
}

int run(const std::string& command, const Options& o)
{
    if (command == "verify") {
        const auto results = didcap::run_verify(o.suite, o.seed);
        Output out(o.out);
        out.stream() << "suite,cases,violations,max_violation,seconds,status\n";
        bool ok = true;
        for (const auto& r : results) {
            out.stream() << r.name << ',' << r.cases << ',' << r.violations << ',' << didcap::fmt(r.max_violation)
                         << ',' << didcap::fmt(r.seconds) << ',' << (r.passed() ? "PASS" : "FAIL") << '\n';
            ok = ok && r.passed();
        }
        return ok ? kExitOk : kExitFailure;
    }

    auto cfg = make_config(o);
    if (command == "lower") return emit_rows(o, didcap::cmd_lower(cfg));
    if (command == "upper") return emit_rows(o, didcap::cmd_upper(cfg));
    if (command == "simrate") return emit_rows(o, didcap::cmd_simrate(cfg));
    if (command == "sweep") {
        cfg.quantities.clear();
        std::stringstream ss(o.quantities);
        std::string item;
        while (std::getline(ss, item, ',')) cfg.quantities.push_back(didcap::parse_quantity(item));
        if (cfg.quantities.empty()) throw didcap::domain_error("--quantities is empty");
        return emit_rows(o, didcap::run_sweep(cfg));
    }
    if (command == "lownoise") {
        if (!o.bsign) return emit_rows(o, didcap::cmd_lownoise(cfg));
        didcap::BSignGrid grid;
        for (const auto& p : cfg.grid) {
            if (p.p_ins != p.p_del) throw didcap::domain_error("the B sign map needs p_i = p_d");
            grid.p_values.push_back(p.p_ins);
        }
        grid.delta1_values = didcap::parse_number_list(o.delta1);
        grid.delta2_values = didcap::parse_number_list(o.delta2);
        grid.c = o.c;
        grid.k_max = o.k_max;
        Output out(o.out);
        didcap::write_b_sign_csv(out.stream(), didcap::b_sign_map(grid));
        return kExitOk;
    }
    if (command == "trivialize") {
        if (!o.L_given) cfg.L = {3};
        Output out(o.out);
        didcap::write_trivialize_csv(out.stream(), didcap::cmd_trivialize(cfg));
        return kExitOk;
    }
    throw didcap::domain_error("unknown command: " + command);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Capacity bounds for the dependent insertion-deletion channel"};
    app.set_config("--config", "", "key=value file mirroring the long options; flags override it");
    app.config_formatter(std::make_shared<CLI::ConfigINI>());
    app.require_subcommand(1, 1);

    Options o;
    std::string p, pi, pd;
    app.add_option("--p", p, "p_i = p_d values (comma list, a:step:b ranges)");
    app.add_option("--pi", pi, "insertion probabilities");
    app.add_option("--pd", pd, "deletion probabilities");
    app.add_option("--L", o.L, "window lengths for upper bounds");
    app.add_option("--tol", o.tol, "tolerance")->capture_default_str();
    app.add_flag("--bitsym,!--no-bitsym", o.bitsym, "impose bit-symmetry in upper bounds (default on)");
    app.add_option("--alpha", o.alpha, "Markov input flip probability for simrate")->capture_default_str();
    app.add_option("--n", o.n, "simulated path length")->capture_default_str();
    app.add_option("--samples", o.samples, "simulated paths")->capture_default_str();
    app.add_option("--seed", o.seed, "random seed")->capture_default_str();
    app.add_option("--out", o.out, "output CSV path (default stdout)");
    app.add_option("--pivot", o.pivot, "also write a one-column-per-quantity pivot CSV here");
    app.add_option("--suite", o.suite, "verify suite: consistency, stationarity, symmetrization, superadditivity, "
                                       "feinstein or all")
        ->capture_default_str();
    app.add_option("--quantities", o.quantities, "sweep quantities")->capture_default_str();
    app.add_flag("--bsign", o.bsign, "lownoise: emit the B sign map instead of the expansion");
    app.add_option("--delta1", o.delta1, "B sign map delta1 grid")->capture_default_str();
    app.add_option("--delta2", o.delta2, "B sign map delta2 grid")->capture_default_str();
    app.add_option("--c", o.c, "B sign map remainder parameter")->capture_default_str();
    app.add_option("--kmax", o.k_max, "B sign map series length")->capture_default_str();

    const char* commands[][2] = {
        {"lower", "Markov-input lower bound, i.u.d. rate and genie-erasure bound"},
        {"upper", "window-L upper bounds"},
        {"lownoise", "low-noise series expansion (or --bsign map)"},
        {"simrate", "Monte Carlo information rates"},
        {"trivialize", "two-string input without stationarity"},
        {"verify", "structural verification suites"},
        {"sweep", "any combination of quantities over a grid"},
    };
    for (const auto& c : commands) app.add_subcommand(c[0], c[1])->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (app.count("--p")) o.p = p;
    if (app.count("--pi")) o.pi = pi;
    if (app.count("--pd")) o.pd = pd;
    o.L_given = app.count("--L") > 0;

    try {
        return run(app.get_subcommands().front()->get_name(), o);
    } catch (const didcap::domain_error& e) {
        std::cerr << "didcap: " << e.what() << '\n';
        return kExitUsage;
    } catch (const didcap::degenerate_parameters& e) {
        std::cerr << "didcap: " << e.what() << '\n';
        return kExitUsage;
    } catch (const didcap::guard_violation& e) {
        std::cerr << "didcap: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "didcap: internal error: " << e.what() << '\n';
        return kExitFailure;
    }
}
