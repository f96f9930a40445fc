// Batch front door: experiment configs in, reports and tables out.
//
// Exit codes: 0 = pass, 1 = usage/config error, 2 = mathematical assertion
// failure (a JSON witness is emitted). Outputs are written atomically.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "oscgeo/axioms.hpp"
#include "oscgeo/cc.hpp"
#include "oscgeo/estimator.hpp"
#include "oscgeo/lp.hpp"
#include "oscgeo/partition.hpp"
#include "oscgeo/tameness.hpp"

using nlohmann::json;
using namespace oscgeo;

namespace {

constexpr const char* kVersion = "0.1.0";

int env_threads() {
    const char* s = std::getenv("OSCIGEO_THREADS");
    if (!s) return 1;
    int v = std::atoi(s);
    return v > 0 ? v : 1;
}

void write_atomic(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::invalid_argument("cannot open output file " + tmp);
        os << content;
    }
    std::filesystem::rename(tmp, path);
}

std::vector<double> parse_lambda_grid(const std::string& spec) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : spec) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    std::vector<double> out;
    if (parts.size() == 4) {
        double a = std::stod(parts[0]), b = std::stod(parts[1]);
        int n = std::stoi(parts[3]);
        if (n < 1 || !(a > 0) || !(b >= a))
            throw std::invalid_argument("bad lambda grid '" + spec + "'");
        for (int i = 0; i < n; ++i) {
            double f = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
            if (parts[2] == "geometric")
                out.push_back(a * std::pow(b / a, f));
            else if (parts[2] == "linear")
                out.push_back(a + (b - a) * f);
            else
                throw std::invalid_argument("bad lambda grid mode '" + parts[2] + "'");
        }
        return out;
    }
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    if (out.empty()) throw std::invalid_argument("empty lambda grid");
    return out;
}

std::vector<std::string> dim_vars(int d) {
    if (d == 1) return {"t"};
    if (d == 2) return {"x", "y"};
    if (d == 3) return {"x", "y", "t"};
    throw std::invalid_argument("dimensions 1..3 only");
}

ScalarField parse_phase(const std::string& expr, int d, double lo, double hi) {
    return ScalarField::parse_field(expr, dim_vars(d), {}, Domain::box(VecD(d, lo), VecD(d, hi)));
}

struct Report {
    std::string command;
    json config;
    json body;
    bool pass = true;
    json witness;

    std::string str() const {
        json out = {{"command", command},
                    {"version", kVersion},
                    {"config", config},
                    {"pass", pass},
                    {"report", body}};
        if (!witness.is_null()) out["witness"] = witness;
        return out.dump(2) + "\n";
    }
};

// file config fills in any option the user did not pass on the command line
void apply_config(CLI::App* cmd, const std::string& config_path) {
    if (config_path.empty()) return;
    std::ifstream is(config_path);
    if (!is) throw std::invalid_argument("cannot read config file " + config_path);
    json cfg;
    try {
        cfg = json::parse(is);
    } catch (const json::exception& e) {
        throw std::invalid_argument("malformed config " + config_path + ": " + e.what());
    }
    for (auto& [key, value] : cfg.items()) {
        auto* opt = cmd->get_option_no_throw("--" + key);
        if (!opt) throw std::invalid_argument("config field '" + key + "' is not an option");
        if (opt->count() > 0) continue;
        std::string v = value.is_string() ? value.get<std::string>() : value.dump();
        opt->add_result(v);
        opt->run_callback();
    }
}

std::vector<VecD> log_grid_1d(double lo, double hi, int n) {
    std::vector<VecD> out;
    for (int i = 0; i < n; ++i)
        out.push_back({lo * std::pow(hi / lo, n == 1 ? 0.0 : double(i) / (n - 1))});
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"oscillatory-integral geometry toolkit"};
    app.set_version_flag("--version", kVersion);
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);

    std::string config_path, out_path = "-", csv_path;
    std::string phase = "t^2", amp, lambda_spec = "1e2:1e5:geometric:8";
    std::string atlas_name = "bnw", system_name = "heisenberg", delta_spec = "0.25";
    int m = 4, l = 0, dim = 1, k = 1, grid = 0, count = 100, points = 40;
    int jmin = -4, jmax = 0, scale = 0, samples = 400, paths = 30000, vol_grid = 24;
    double T = 1.0, omega = 0.3, amp_width = 1.0, amp_center = 0.0;
    double red_width = 0.4, red_center = 0.0;
    double lo = 0.3, hi = 3.0, C_tame = 0.5, eps = 1.0, slack = 0.1, tol = 1e-8;
    std::uint64_t seed = 1;
    bool fixed_scale = false;

    auto add_common = [&](CLI::App* c) {
        c->add_option("--config", config_path, "JSON config; flags override its fields");
        c->add_option("--out", out_path, "report path ('-' for stdout)");
    };

    auto* tame = app.add_subcommand("tame-check", "tameness constant of a convex phase");
    tame->add_option("--phase", phase);
    tame->add_option("--order", m);
    tame->add_option("--T", T);
    tame->add_option("--grid", grid);
    add_common(tame);

    auto* epsf = app.add_subcommand("eps-find", "largest admissible epsilon");
    epsf->add_option("--phase", phase);
    epsf->add_option("--m", m);
    epsf->add_option("--l", l);
    epsf->add_option("--grid", grid);
    add_common(epsf);

    auto* lpv = app.add_subcommand("lp-verify", "polynomial reproduction of the projections");
    lpv->add_option("--dim", dim);
    lpv->add_option("--m", m);
    lpv->add_option("--count", count);
    lpv->add_option("--seed", seed);
    lpv->add_option("--tol", tol);
    add_common(lpv);

    auto* axs = app.add_subcommand("axioms", "homogeneous-space axioms of an atlas");
    axs->add_option("--atlas", atlas_name)->check(CLI::IsMember({"bnw", "flat"}));
    axs->add_option("--dim", dim);
    axs->add_option("--jmin", jmin);
    axs->add_option("--jmax", jmax);
    axs->add_option("--points", points);
    axs->add_option("--m", m);
    axs->add_option("--seed", seed);
    add_common(axs);

    auto* part = app.add_subcommand("partition", "partition of unity on the ray atlas");
    part->add_option("--phase", phase);
    part->add_option("--C", C_tame);
    part->add_option("--scale", scale);
    part->add_flag("--fixed-scale", fixed_scale, "use --scale everywhere instead of the phase");
    part->add_option("--lo", lo);
    part->add_option("--hi", hi);
    part->add_option("--samples", samples);
    add_common(part);

    auto* red = app.add_subcommand("reduce", "symbolic amplitude reduction");
    red->add_option("--phase", phase);
    red->add_option("--dim", dim);
    red->add_option("--k", k);
    red->add_option("--omega", omega);
    red->add_option("--grid", grid);
    red->add_option("--amp-width", red_width);
    red->add_option("--amp-center", red_center);
    add_common(red);

    auto* dec = app.add_subcommand("decay", "oscillatory decay scan against the bound");
    dec->add_option("--phase", phase);
    dec->add_option("--lambda", lambda_spec);
    dec->add_option("--l", l);
    dec->add_option("--m", m);
    dec->add_option("--amp-width", amp_width);
    dec->add_option("--amp-center", amp_center);
    dec->add_option("--csv", csv_path, "also write the table as CSV");
    add_common(dec);

    auto* sub = app.add_subcommand("sublevel", "sublevel-set comparison for convex phases");
    sub->add_option("--phase", phase);
    sub->add_option("--lambda", lambda_spec);
    sub->add_option("--l", l);
    add_common(sub);

    auto* ccc = app.add_subcommand("cc-check", "Carnot-Caratheodory geometry checks");
    ccc->add_option("--system", system_name)
        ->check(CLI::IsMember({"heisenberg", "flat", "grushin", "grushin_full"}));
    ccc->add_option("--delta", delta_spec, "comma-separated scale vector");
    ccc->add_option("--paths", paths);
    ccc->add_option("--seed", seed);
    ccc->add_option("--grid", vol_grid);
    ccc->add_option("--slack", slack);
    ccc->add_option("--csv", csv_path, "also write the sampled cloud as CSV");
    add_common(ccc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;  // usage errors are exit 1; --help/--version exit 0
    }
    CLI::App* cmd = app.get_subcommands().front();

    Report rep;
    rep.command = cmd->get_name();
    try {
        apply_config(cmd, config_path);
        rep.config["threads"] = env_threads();
        for (const auto* opt : cmd->get_options()) {
            if (opt->get_name() == "--config" || opt->get_name() == "--help") continue;
            std::string name = opt->get_name().substr(2);
            auto rs = opt->results();
            if (!rs.empty())
                rep.config[name] = rs.back();
            else
                rep.config[name] = opt->get_default_str();
        }

        if (cmd == tame) {
            auto f = parse_phase(phase, 1, 1e-12, T);
            auto r = tameness_constant(f, T, m, grid > 0 ? grid : 2048);
            rep.body = r.json();
            rep.body["C"] = r.C;
            rep.pass = r.finite();
            if (!rep.pass) rep.witness = {{"violation_points", r.violation_points}};
        } else if (cmd == epsf) {
            auto f = parse_phase(phase, dim, -1.0, 1.0);
            auto c = epsilon_for(f, m, l, grid);
            rep.body = c.json();
            rep.pass = c.sound();
            if (!rep.pass) rep.witness = {{"lhs", c.lhs}, {"rhs", c.rhs}};
        } else if (cmd == lpv) {
            Mollifier phi = make_mollifier(dim, m);
            std::mt19937 rng(static_cast<unsigned>(seed));
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            double worst = 0;
            VecD worst_x;
            for (int rep_i = 0; rep_i < count; ++rep_i) {
                ScalarField f = [&] {
                    if (dim == 1) {
                        ParamMap coef;
                        for (int i = 0; i <= m; ++i) coef["c" + std::to_string(i)] = u(rng);
                        return catalog_get("polynomial", coef);
                    }
                    std::ostringstream ex;
                    ex.precision(17);
                    bool first = true;
                    for (int a = 0; a <= m; ++a)
                        for (int b = 0; a + b <= m; ++b) {
                            ex << (first ? "" : " + ") << u(rng) << "*x^" << a << "*y^" << b;
                            first = false;
                        }
                    return parse_phase(ex.str(), 2, -2.0, 2.0);
                }();
                for (int j : {2, 3, 4}) {
                    double lim = 1.0 - std::pow(2.0, -j);
                    VecD x(dim), h(dim);
                    for (int a = 0; a < dim; ++a) {
                        x[a] = u(rng) * lim * 0.7;
                        h[a] = u(rng) * 0.2;
                    }
                    LPValue lp = lp_project(f, j, x, h, phi);
                    VecD xh = x;
                    for (int a = 0; a < dim; ++a) xh[a] += h[a];
                    double err = std::abs(lp.value - f(xh));
                    if (err > worst) {
                        worst = err;
                        worst_x = x;
                    }
                }
            }
            rep.body = {{"max_error", worst}, {"tolerance", tol}, {"polynomials", count}};
            rep.pass = worst <= tol;
            if (!rep.pass) rep.witness = {{"x", worst_x}, {"error", worst}};
        } else if (cmd == axs) {
            std::shared_ptr<const ChartAtlas> atlas;
            if (atlas_name == "bnw")
                atlas = bnw_atlas(dim);
            else
                atlas = std::make_shared<FlatAtlas>();
            std::mt19937 rng(static_cast<unsigned>(seed));
            std::uniform_real_distribution<double> u(-2.0, 2.0);
            AxiomProbe probe;
            probe.jmin = jmin;
            probe.jmax = jmax;
            probe.m = m;
            while (static_cast<int>(probe.points.size()) < points) {
                VecD x(atlas->ambient_dim());
                double n2 = 0;
                for (double& c : x) {
                    c = u(rng);
                    n2 += c * c;
                }
                if (atlas_name == "bnw" && n2 < 0.04) continue;
                probe.points.push_back(x);
            }
            auto r = check_axioms(*atlas, probe);
            rep.body = r.json();
            rep.pass = r.all_pass();
            if (!rep.pass && !r.witnesses.empty())
                rep.witness = {{"axiom", r.witnesses.front().axiom},
                               {"x", r.witnesses.front().x},
                               {"value", r.witnesses.front().value}};
        } else if (cmd == part) {
            auto atlas = bnw_atlas(1);
            auto region = log_grid_1d(lo, hi, samples);
            std::function<int(const VecD&)> R;
            if (fixed_scale) {
                R = [scale](const VecD&) { return scale; };
            } else {
                auto f = parse_phase(phase, 1, 1e-9, 4 * hi);
                auto assign = bnw_scale_assignment(f, C_tame);
                R = assign.scale;
            }
            Partition p = build_partition(atlas, R, region, 2);
            double max_dev = 0;
            VecD worst_y;
            for (const VecD& y : region) {
                double dev = std::abs(p.sum(y) - 1.0);
                if (dev > max_dev) {
                    max_dev = dev;
                    worst_y = y;
                }
            }
            rep.body = p.json();
            rep.body["max_partition_deviation"] = max_dev;
            rep.pass = max_dev <= 1e-12;
            if (!rep.pass) rep.witness = {{"y", worst_y}, {"deviation", max_dev}};
        } else if (cmd == red) {
            auto f = parse_phase(phase, dim, -2.0, 2.0);
            ParamMap ap = {{"d", double(dim)}, {"w", red_width}};
            for (int a = 0; a < dim; ++a) ap["c" + std::to_string(a)] = red_center;
            auto psi = catalog_get("gaussian_bump", ap);
            auto r = reduce_amplitude(f, psi, k, omega, grid);
            rep.body = {{"sharpjunk_constant", r.sharpjunk_constant()},
                        {"k", k},
                        {"expansion", r.expansion().json()}};
            rep.pass = std::isfinite(r.sharpjunk_constant());
        } else if (cmd == dec) {
            auto f = parse_phase(phase, 1, -2.0, 2.0);
            auto psi = catalog_get("gaussian_bump",
                                   {{"d", 1}, {"w", amp_width}, {"c0", amp_center}});
            auto table = decay_scan(f, psi, parse_lambda_grid(lambda_spec), l, m);
            rep.body = table.json();
            rep.pass = true;
            for (const auto& row : table.rows) rep.pass = rep.pass && row.resolved;
            if (!rep.pass) rep.witness = {{"note", "unresolved quadrature rows"}};
            if (!csv_path.empty()) write_atomic(csv_path, table.csv());
        } else if (cmd == sub) {
            auto f = parse_phase(phase, 1, -2.0, 2.0);
            json rows = json::array();
            rep.pass = true;
            for (double lambda : parse_lambda_grid(lambda_spec)) {
                auto r = sublevel_compare(f, lambda, l);
                rows.push_back(r.json());
                rep.pass = rep.pass && r.shells_geometric;
            }
            rep.body = {{"rows", rows}};
        } else if (cmd == ccc) {
            auto sys = cc_system(system_name);
            std::vector<double> delta;
            for (double v : parse_lambda_grid(delta_spec)) delta.push_back(v);
            if (static_cast<int>(delta.size()) != sys.scale_dim)
                throw std::invalid_argument("delta arity does not match the system");
            VecD x0(sys.dim, 0.0);
            auto r = cc_axiom_check(sys, x0, delta, paths, seed, vol_grid, slack);
            rep.body = r.json();
            rep.pass = r.all_pass();
            if (!rep.pass && !r.witnesses.empty())
                rep.witness = {{"axiom", r.witnesses.front().axiom},
                               {"note", r.witnesses.front().note},
                               {"value", r.witnesses.front().value}};
            if (!csv_path.empty()) {
                auto cloud = cc_ball_sample(sys, x0, delta, std::min(paths, 10000), 32, seed);
                write_atomic(csv_path, cloud.csv());
            }
        }
    } catch (const ConvexityError& e) {
        rep.pass = false;
        rep.witness = {{"error", "convexity"},
                       {"where", e.where},
                       {"second_derivative", e.second_derivative}};
        write_atomic(out_path, rep.str());
        return 2;
    } catch (const PartitionHypothesisError& e) {
        rep.pass = false;
        rep.witness = {{"error", "scale_regularity"}, {"x", e.x}, {"xp", e.xp},
                       {"rx", e.rx}, {"rxp", e.rxp}};
        write_atomic(out_path, rep.str());
        return 2;
    } catch (const GradientVanishes& e) {
        rep.pass = false;
        rep.witness = {{"error", "gradient_vanishes"}, {"x", e.x}, {"grad_norm", e.grad_norm}};
        write_atomic(out_path, rep.str());
        return 2;
    } catch (const OmegaViolation& e) {
        rep.pass = false;
        rep.witness = {{"error", "omega_violation"}, {"x", e.x}, {"omega", e.omega},
                       {"required_inverse", e.required_inverse}};
        write_atomic(out_path, rep.str());
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    write_atomic(out_path, rep.str());
    return rep.pass ? 0 : 2;
}
