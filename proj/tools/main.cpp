// Command-line frontend: every library experiment as a subcommand with a
// reproducible config echo and CSV/JSON artifacts.  Exit codes: 0 success,
// 1 verdict failure (a check ran and said no), 2 input error.

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "chronoreach/growth.hpp"
#include "chronoreach/parse.hpp"
#include "chronoreach/perturb.hpp"
#include "chronoreach/picard_fit.hpp"
#include "chronoreach/seminorm.hpp"
#include "chronoreach/variation.hpp"

namespace cr = chronoreach;
using njson = nlohmann::ordered_json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw cr::InputError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

cr::ControlSystem load_system(const std::string& path) {
    try {
        return cr::parse_system(read_file(path));
    } catch (const cr::ParseError& e) {
        throw cr::InputError(path + ": " + e.what());
    }
}

std::vector<cr::Rational> rat_list(const std::string& text, const char* what) {
    cr::detail::Scanner sc(text);
    std::vector<cr::Rational> out;
    try {
        while (true) {
            out.push_back(cr::detail::scan_signed_number(sc, /*allow_exp=*/true));
            if (sc.eof()) break;
            sc.expect(',', "between list entries");
        }
    } catch (const cr::ParseError& e) {
        throw cr::InputError(std::string(what) + ": " + e.what());
    }
    return out;
}

std::vector<double> double_list(const std::string& text, const char* what) {
    std::vector<double> out;
    for (const cr::Rational& q : rat_list(text, what)) out.push_back(cr::to_double(q));
    return out;
}

std::vector<int> int_list(const std::string& text, const char* what) {
    std::vector<int> out;
    for (const cr::Rational& q : rat_list(text, what)) {
        const double d = cr::to_double(q);
        const int i = static_cast<int>(d);
        if (static_cast<double>(i) != d)
            throw cr::InputError(std::string(what) + ": expected integers");
        out.push_back(i);
    }
    return out;
}

// "(1,1/2);(-1/3,1)" -> exact control tuples, schedule-literal syntax sans durations
std::vector<std::vector<cr::Rational>> controls_literal(const std::string& text, int m) {
    cr::detail::Scanner sc(text);
    std::vector<std::vector<cr::Rational>> out;
    while (true) {
        sc.expect('(', "to open control tuple");
        std::vector<cr::Rational> u;
        if (!sc.consume(')')) {
            while (true) {
                u.push_back(cr::detail::scan_signed_number(sc, /*allow_exp=*/true));
                if (sc.consume(')')) break;
                sc.expect(',', "between control entries");
            }
        }
        if (static_cast<int>(u.size()) != m)
            sc.fail("control tuple has " + std::to_string(u.size()) + " entries, expected " +
                    std::to_string(m));
        for (const auto& c : u)
            if (c < -1 || c > 1) sc.fail("control outside [-1,1]");
        out.push_back(std::move(u));
        if (sc.eof()) break;
        sc.expect(';', "between tuples");
        if (sc.eof()) break;
    }
    return out;
}

std::vector<cr::Rational> resolve_x0(const cr::ControlSystem& sys, const std::string& flag) {
    if (flag.empty()) return sys.basepoint;
    auto v = rat_list(flag, "--x0");
    if (static_cast<int>(v.size()) != sys.dim)
        throw cr::InputError("--x0 needs exactly " + std::to_string(sys.dim) + " entries");
    return v;
}

std::vector<double> to_doubles(const std::vector<cr::Rational>& v) {
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& q : v) out.push_back(cr::to_double(q));
    return out;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += cr::fmt_double(v[i]);
    }
    return s;
}

// Config echo shared by all commands: one stdout line, '#' preamble in CSV
// artifacts, a "config" object in JSON ones.
struct Output {
    std::vector<std::pair<std::string, std::string>> cfg;
    bool json = false;
    std::string out_path;

    void add(const std::string& k, std::string v) { cfg.emplace_back(k, std::move(v)); }
    void add(const std::string& k, const char* v) { cfg.emplace_back(k, std::string(v)); }
    void add(const std::string& k, double v) { cfg.emplace_back(k, cr::fmt_double(v)); }
    void add(const std::string& k, int v) { cfg.emplace_back(k, std::to_string(v)); }
    void add(const std::string& k, std::uint64_t v) { cfg.emplace_back(k, std::to_string(v)); }

    void echo() const {
        std::string line = "config:";
        for (const auto& [k, v] : cfg) line += " " + k + "=" + v;
        std::puts(line.c_str());
    }

    void write(const std::string& text) const {
        if (out_path.empty()) {
            std::fputs(text.c_str(), stdout);
            return;
        }
        std::ofstream o(out_path, std::ios::binary);
        if (!o) throw cr::InputError("cannot write file: " + out_path);
        o << text;
    }

    void csv(const std::string& body) const {
        std::string full;
        for (const auto& [k, v] : cfg) full += "# " + k + "=" + v + "\n";
        full += body;
        write(full);
    }

    void emit_json(njson result) const {
        njson j;
        njson c;
        for (const auto& [k, v] : cfg) c[k] = v;
        j["config"] = std::move(c);
        j["result"] = std::move(result);
        write(j.dump(2) + "\n");
    }
};

cr::SteerConfig make_steer(int p, int restarts, int iters, double step, std::uint64_t seed) {
    cr::SteerConfig st;
    st.p = p;
    st.restarts = restarts;
    st.max_iters = iters;
    st.step = step;
    st.seed = seed;
    return st;
}

njson growth_json(const cr::GrowthReport& rep, double threshold) {
    njson entries = njson::array();
    for (const auto& e : rep.entries)
        entries.push_back({{"t", e.t},
                           {"radius", e.radius},
                           {"coverage", e.coverage},
                           {"sample_covered", e.sample_covered},
                           {"steer_covered", e.steer_covered}});
    return njson{{"N", rep.N},
                 {"C", rep.C},
                 {"delta", rep.delta},
                 {"directions", rep.directions},
                 {"entries", std::move(entries)},
                 {"passes", rep.passes(threshold)}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chronoreach: exact flow expansions, reachable-set experiments, perturbation scaling"};
    app.require_subcommand(1);
    int rc = 0;

    // ---------------------------------------------------------------- parse
    {
        struct Opts {
            std::string file, out;
            bool json = false;
        };
        auto o = std::make_shared<Opts>();
        auto* cmd = app.add_subcommand("parse", "parse and validate a system file, print canonical form");
        cmd->add_option("file", o->file, "system file (.ctrl)")->required();
        cmd->add_flag("--json", o->json, "JSON report");
        cmd->add_option("--out", o->out, "artifact path (default stdout)");
        cmd->callback([o, &rc]() {
            const cr::ControlSystem sys = load_system(o->file);
            Output out;
            out.json = o->json;
            out.out_path = o->out;
            out.add("cmd", "parse");
            out.add("file", o->file);
            const std::string canonical = cr::serialize(sys);
            if (o->json) {
                njson base = njson::array();
                for (const auto& q : sys.basepoint) base.push_back(cr::rational_str(q));
                out.emit_json(njson{{"name", sys.name},
                                    {"dim", sys.dim},
                                    {"controls", sys.m},
                                    {"basepoint", std::move(base)},
                                    {"canonical", canonical}});
            } else {
                out.write(canonical);
            }
            rc = 0;
        });
    }

    // ----------------------------------------------------------------- flow
    {
        struct Opts {
            std::string file, schedule, x0, out, trace;
            double step = 1e-3;
            bool json = false;
        };
        auto o = std::make_shared<Opts>();
        auto* cmd = app.add_subcommand("flow", "integrate a schedule numerically");
        cmd->add_option("file", o->file)->required();
        cmd->add_option("--schedule", o->schedule, "schedule literal \"(u1,..):d;..\"")->required();
        cmd->add_option("--x0", o->x0, "basepoint override, comma list");
        cmd->add_option("--step", o->step, "integrator step");
        cmd->add_option("--trace", o->trace, "write trajectory CSV to this path");
        cmd->add_flag("--json", o->json);
        cmd->add_option("--out", o->out);
        cmd->callback([o, &rc]() {
            const cr::ControlSystem sys = load_system(o->file);
            const auto x0 = to_doubles(resolve_x0(sys, o->x0));
            const cr::Schedule sched = cr::parse_schedule_literal(o->schedule, sys.m).to_schedule();
            cr::FlowOptions fopt;
            fopt.step = o->step;
            fopt.trace = !o->trace.empty();
            Output out;
            out.json = o->json;
            out.out_path = o->out;
            out.add("cmd", "flow");
            out.add("file", o->file);
            out.add("schedule", cr::format_schedule(sched));
            out.add("x0", join_doubles(x0));
            out.add("step", o->step);
            const cr::FlowResult res = cr::flow_numeric(sys, sched, x0, fopt);
            if (!o->trace.empty()) {
                std::string csv = "t";
                for (int i = 1; i <= sys.dim; ++i) csv += ",x_" + std::to_string(i);
                csv += '\n';
                for (const auto& [t, state] : res.trajectory) {
                    csv += cr::fmt_double(t);
                    for (double v : state) csv += "," + cr::fmt_double(v);
                    csv += '\n';
                }
                std::ofstream tr(o->trace, std::ios::binary);
                if (!tr) throw cr::InputError("cannot write file: " + o->trace);
                tr << csv;
            }
            if (o->json) {
                out.emit_json(njson{{"endpoint", res.endpoint}, {"total", sched.total()}});
            } else {
                out.echo();
                std::printf("endpoint = (%s)\n", join_doubles(res.endpoint).c_str());
            }
            rc = 0;
        });
    }

    // --------------------------------------------------------------- chrono
    {
        struct Opts {
            std::string file, controls, durations, x0, out;
            int order = 0;
            bool json = false;
        };
        auto o = std::make_shared<Opts>();
        auto* cmd = app.add_subcommand("chrono", "exact truncated flow expansion in segment durations");
        cmd->add_option("file", o->file)->required();
        cmd->add_option("--order", o->order, "truncation order (total degree)")->required();
        cmd->add_option("--controls", o->controls, "control tuples \"(1,1/2);(-1/3,1)\"")->required();
        cmd->add_option("--durations", o->durations, "evaluate exactly at these durations");
        cmd->add_option("--x0", o->x0);
        cmd->add_flag("--json", o->json);
        cmd->add_option("--out", o->out);
        cmd->callback([o, &rc]() {
            const cr::ControlSystem sys = load_system(o->file);
            const auto x0 = resolve_x0(sys, o->x0);
            const auto ctl = controls_literal(o->controls, sys.m);
            const cr::FlowPolynomial fp = cr::truncated_flow(sys, ctl, o->order, x0);
            Output out;
            out.json = o->json;
            out.out_path = o->out;
            out.add("cmd", "chrono");
            out.add("file", o->file);
            out.add("order", o->order);
            out.add("controls", o->controls);
            std::string eval;
            if (!o->durations.empty()) {
                const auto durs = rat_list(o->durations, "--durations");
                const auto vals = fp.eval_exact(durs);
                for (std::size_t i = 0; i < vals.size(); ++i)
                    eval += (i ? ", " : "") + cr::rational_str(vals[i]);
            }
            if (o->json) {
                njson res{{"flow", fp.to_string()}};
                if (!eval.empty()) res["eval"] = eval;
                out.emit_json(std::move(res));
            } else {
                out.echo();
                std::fputs(fp.to_string().c_str(), stdout);
                if (!eval.empty()) std::printf("eval = (%s)\n", eval.c_str());
            }
            rc = 0;
        });
    }

    // -------------------------------------------------------------- contact
    {
        struct Opts {
            std::string fx, fy, x0, out;
            int order = 0;
            bool json = false;
        };
        auto o = std::make_shared<Opts>();
        auto* cmd = app.add_subcommand("contact", "exact derivative agreement of two systems at x0");
        cmd->add_option("fileX", o->fx)->required();
        cmd->add_option("fileY", o->fy)->required();
        cmd->add_option("--order", o->order)->required();
        cmd->add_option("--x0", o->x0);
        cmd->add_flag("--json", o->json);
        cmd->add_option("--out", o->out);
        cmd->callback([o, &rc]() {
            const cr::ControlSystem X = load_system(o->fx);
            const cr::ControlSystem Y = load_system(o->fy);
            const auto x0 = resolve_x0(X, o->x0);
            const cr::ContactReport rep = cr::kth_contact(X, Y, x0, o->order);
            Output out;
            out.json = o->json;
            out.out_path = o->out;
            out.add("cmd", "contact");
            out.add("fileX", o->fx);
            out.add("fileY", o->fy);
            out.add("order", o->order);
            std::string verdict;
            if (rep.equal) {
                verdict = "contact holds to order " + std::to_string(o->order);
            } else {
                verdict = "contact fails: field " + std::to_string(rep.field) + " component " +
                          std::to_string(rep.component) + " derivative " +
                          cr::Poly::monomial(static_cast<int>(rep.r.size()), rep.r, cr::Rational(1))
                              .to_string("x") +
                          " (" + cr::rational_str(rep.lhs) + " != " + cr::rational_str(rep.rhs) + ")";
            }
            if (o->json) {
                out.emit_json(njson{{"equal", rep.equal}, {"verdict", verdict}});
            } else {
                out.echo();
                std::puts(verdict.c_str());
            }
            rc = rep.equal ? 0 : 1;
        });
    }

    // --------------------------------------------------------- contact-flow
    {
        struct Opts {
            std::string fx, fy, controls, x0, out;
            int order = 0, segments = 2;
            std::uint64_t seed = 0;
            bool json = false;
        };
        auto o = std::make_shared<Opts>();
        auto* cmd = app.add_subcommand("contact-flow",
                                       "exact equality of truncated flows (seeded rational controls)");
        cmd->add_option("fileX", o->fx)->required();
        cmd->add_option("fileY", o->fy)->required();
        cmd->add_option("--order", o->order)->required();
        cmd->add_option("--segments", o->segments);
        cmd->add_option("--seed", o->seed)->required();
        cmd->add_option("--controls", o->controls, "explicit tuples override the seeded draw");
        cmd->add_option("--x0", o->x0);
        cmd->add_flag("--json", o->json);
        cmd->add_option("--out", o->out);
        cmd->callback([o, &rc]() {
            const cr::ControlSystem X = load_system(o->fx);
            const cr::ControlSystem Y = load_system(o->fy);
            const auto x0 = resolve_x0(X, o->x0);
            std::vector<std::vector<cr::Rational>> ctl;
            if (o->controls.empty()) {
                cr::Rng rng(o->seed);
                ctl = cr::random_rational_controls(rng, X.m, o->segments);
            } else {
                ctl = controls_literal(o->controls, X.m);
            }
            const cr::FlowIdentityReport rep = cr::contact_flow_identity(X, Y, x0, o->order, ctl);
            Output out;
            out.json = o->json;
            out.out_path = o->out;
            out.add("cmd", "contact-flow");
            out.add("fileX", o->fx);
            out.add("fileY", o->fy);
            out.add("order", o->order);
            out.add("segments", static_cast<int>(ctl.size()));
            out.add("seed", o->seed);
            if (o->json) {
                out.emit_json(njson{{"equal", rep.equal}, {"witness", rep.witness()}});
            } else {
                out.echo();
                std::puts(rep.witness().c_str());
            }
            rc = rep.equal ? 0 : 1;
        });
    }

    // --------------------------------------------------------- picard-error
    {
        struct Opts {
            std::string file, schedule, x0, out;
            int order = 0;
            double step = 1e-3;
            bool json = false;
        };
        auto o = std::make_shared<Opts>();
        auto* cmd = app.add_subcommand("picard-error",
                                       "distance between numeric endpoint and truncated expansion");
        cmd->add_option("file", o->file)->required();
        cmd->add_option("--order", o->order)->required();
        cmd->add_option("--schedule", o->schedule, "exact schedule literal")->required();
        cmd->add_option("--x0", o->x0);
        cmd->add_option("--step", o->step);
        cmd->add_flag("--json", o->json);
        cmd->add_option("--out", o->out);
        cmd->callback([o, &rc]() {
            const cr::ControlSystem sys = load_system(o->file);
            const auto x0 = resolve_x0(sys, o->x0);
            const cr::RationalSchedule rs = cr::parse_schedule_literal(o->schedule, sys.m);
            const double err = cr::picard_error(sys, rs.controls, rs.durations, x0, o->order, o->step);
            Output out;
            out.json = o->json;
            out.out_path = o->out;
            out.add("cmd", "picard-error");
            out.add("file", o->file);
            out.add("order", o->order);
            out.add("schedule", o->schedule);
            out.add("step", o->step);
            if (o->json) {
                out.emit_json(njson{{"error", err}});
            } else {
                out.echo();
                std::printf("error = %s\n", cr::fmt_double(err).c_str());
            }
            rc = 0;
        });
    }

    // ----------------------------------------------------------- picard-fit
    {
        struct Opts {
            std::string file, orders = "1,2,3,4", times, controls, x0, out;
            double step = 1e-3, noise_floor = 1e-11;
            bool json = false;
        };
        auto o = std::make_shared<Opts>();
        auto* cmd = app.add_subcommand("picard-fit",
                                       "error-vs-horizon scaling with a dominating (M, L) envelope");
        cmd->add_option("file", o->file)->required();
        cmd->add_option("--orders", o->orders, "comma list of truncation orders");
        cmd->add_option("--times", o->times, "comma list of horizons (exact rationals)")->required();
        cmd->add_option("--controls", o->controls, "control tuples; duration splits equally")->required();
        cmd->add_option("--x0", o->x0);
        cmd->add_option("--step", o->step);
        cmd->add_option("--noise-floor", o->noise_floor);
        cmd->add_flag("--json", o->json);
        cmd->add_option("--out", o->out);
        cmd->callback([o, &rc]() {
            const cr::ControlSystem sys = load_system(o->file);
            const auto x0 = resolve_x0(sys, o->x0);
            const auto ctl = controls_literal(o->controls, sys.m);
            const auto orders = int_list(o->orders, "--orders");
            const auto times = rat_list(o->times, "--times");
            const cr::PicardFitReport rep =
                cr::picard_fit(sys, ctl, x0, orders, times, o->step, o->noise_floor);
            Output out;
            out.json = o->json;
            out.out_path = o->out;
            out.add("cmd", "picard-fit");
            out.add("file", o->file);
            out.add("orders", o->orders);
            out.add("times", o->times);
            out.add("controls", o->controls);
            out.add("step", o->step);
            out.add("noise_floor", o->noise_floor);
            if (o->json) {
                njson slopes = njson::array();
                for (const auto& s : rep.slopes)
                    slopes.push_back({{"k", s.k}, {"slope", s.slope}});
                out.emit_json(njson{{"M", rep.M},
                                    {"L", rep.L},
                                    {"dominated", rep.dominated},
                                    {"degenerate", rep.degenerate},
                                    {"diagnostic", rep.diagnostic},
                                    {"slopes", std::move(slopes)},
                                    {"csv", rep.to_csv()}});
            } else {
                out.echo();
                std::printf("M = %s  L = %s  dominated = %s%s\n", cr::fmt_double(rep.M).c_str(),
                            cr::fmt_double(rep.L).c_str(), rep.dominated ? "yes" : "no",
                            rep.degenerate ? "  (degenerate)" : "");
                for (const auto& s : rep.slopes)
                    std::printf("k = %d  slope = %s\n", s.k, cr::fmt_double(s.slope).c_str());
                out.csv(rep.to_csv());
            }
            rc = rep.degenerate || rep.dominated ? 0 : 1;
        });
    }

    // ------------------------------------------------------------- seminorm
    {
        struct Opts {
            std::string file, function, weights, box, out;
            int field = 0, order = -1, grid = 11;
            bool json = false;
        };
        auto o = std::make_shared<Opts>();
        auto* cmd = app.add_subcommand("seminorm",
                                       "weighted max-derivative seminorm of a field applied to a function");
        cmd->add_option("file", o->file)->required();
        cmd->add_option("--field", o->field, "field index 0..m")->required();
        cmd->add_option("--function", o->function, "polynomial in x1..xn")->required();
        cmd->add_option("--order", o->order, "weight count (default: degree of the derivative)");
        cmd->add_option("--weights", o->weights, "explicit weight list a_0,a_1,..");
        cmd->add_option("--box", o->box, "per-axis ranges \"lo:hi,lo:hi,..\"");
        cmd->add_option("--grid", o->grid, "evaluation points per axis");
        cmd->add_flag("--json", o->json);
        cmd->add_option("--out", o->out);
        cmd->callback([o, &rc]() {
            const cr::ControlSystem sys = load_system(o->file);
            if (o->field < 0 || o->field > sys.m)
                throw cr::InputError("--field must be in 0.." + std::to_string(sys.m));
            const cr::PolyVectorField& V = sys.fields[static_cast<std::size_t>(o->field)];
            const cr::Poly f = cr::parse_poly(o->function, sys.dim);
            const cr::Poly g = cr::lie_derivative(V, f);
            const int max_order = o->order >= 0 ? o->order : std::max(0, g.total_degree());
            cr::SeminormSpec spec = cr::default_seminorm_spec(sys.dim, max_order);
            spec.grid = o->grid;
            if (!o->weights.empty()) spec.weights = rat_list(o->weights, "--weights");
            if (!o->box.empty()) {
                cr::detail::Scanner sc(o->box);
                spec.box.clear();
                while (true) {
                    const cr::Rational lo = cr::detail::scan_signed_number(sc, true);
                    sc.expect(':', "between box bounds");
                    const cr::Rational hi = cr::detail::scan_signed_number(sc, true);
                    spec.box.emplace_back(lo, hi);
                    if (sc.eof()) break;
                    sc.expect(',', "between box axes");
                }
            }
            const cr::Rational exact = cr::seminorm_exact(V, f, spec);
            Output out;
            out.json = o->json;
            out.out_path = o->out;
            out.add("cmd", "seminorm");
            out.add("file", o->file);
            out.add("field", o->field);
            out.add("function", o->function);
            out.add("grid", o->grid);
            out.add("weights", static_cast<int>(spec.weights.size()));
            if (o->json) {
                out.emit_json(
                    njson{{"exact", cr::rational_str(exact)}, {"value", cr::to_double(exact)}});
            } else {
                out.echo();
                std::printf("seminorm = %s (= %s)\n", cr::rational_str(exact).c_str(),
                            cr::fmt_double(cr::to_double(exact)).c_str());
            }
            rc = 0;
        });
    }

    // ---------------------------------------------------------------- reach
    {
        struct Opts {
            std::string file, x0, mode = "bang-bang", out;
            double t = 0.5, step = 1e-3, sigma_max = 0.99;
            int count = 1000, p = 3, jobs = 1;
            std::uint64_t seed = 0;
            bool json = false;
        };
        auto o = std::make_shared<Opts>();
        auto* cmd = app.add_subcommand("reach", "sample reachable endpoints under seeded schedules");
        cmd->add_option("file", o->file)->required();
        cmd->add_option("--t", o->t, "horizon")->required();
        cmd->add_option("--count", o->count);
        cmd->add_option("--p", o->p, "segments per schedule");
        cmd->add_option("--seed", o->seed)->required();
        cmd->add_option("--mode", o->mode)->check(CLI::IsMember({"bang-bang", "uniform"}));
        cmd->add_option("--sigma-max", o->sigma_max);
        cmd->add_option("--step", o->step);
        cmd->add_option("--jobs", o->jobs);
        cmd->add_option("--x0", o->x0);
        cmd->add_flag("--json", o->json);
        cmd->add_option("--out", o->out);
        cmd->callback([o, &rc]() {
            const cr::ControlSystem sys = load_system(o->file);
            const auto x0 = to_doubles(resolve_x0(sys, o->x0));
            cr::SampleConfig scfg;
            scfg.count = o->count;
            scfg.p = o->p;
            scfg.seed = o->seed;
            scfg.mode = o->mode == "uniform" ? cr::SampleMode::Uniform : cr::SampleMode::BangBang;
            scfg.step = o->step;
            scfg.sigma_max = o->sigma_max;
            scfg.jobs = o->jobs;
            const cr::ReachSample sample = cr::sample_reachable(sys, x0, o->t, scfg);
            Output out;
            out.json = o->json;
            out.out_path = o->out;
            out.add("cmd", "reach");
            out.add("file", o->file);
            out.add("t", o->t);
            out.add("count", o->count);
            out.add("p", o->p);
            out.add("seed", o->seed);
            out.add("mode", o->mode);
            if (o->json) {
                out.emit_json(
                    njson{{"points", sample.points.size()}, {"csv", sample.to_csv(sys.dim)}});
            } else {
                out.csv(sample.to_csv(sys.dim));
            }
            rc = 0;
        });
    }

    // --------------------------------------------------------------- growth
    {
        struct Opts {
            std::string file, x0, times = "0.5,0.25,0.125", out;
            int N = 2, count = 20000, p = 4, directions = 150, jobs = 1;
            int restarts = 10, iters = 300, p_max = 4;
            std::size_t budget = 100000;
            double C = -1.0, delta = 0.05, threshold = 0.95, step = 1e-3;
            bool calibrate = false, no_refine = false, json = false;
            std::uint64_t seed = 0;
        };
        auto o = std::make_shared<Opts>();
        auto* cmd = app.add_subcommand("growth", "ball-coverage growth test at radius C*t^N");
        cmd->add_option("file", o->file)->required();
        cmd->add_option("--N", o->N)->required();
        auto* copt = cmd->add_option("--C", o->C, "growth constant");
        auto* cal = cmd->add_flag("--calibrate", o->calibrate,
                                  "derive C from the brute-force schedule grid at the largest t");
        copt->excludes(cal);
        cmd->add_option("--times", o->times, "decreasing horizon grid");
        cmd->add_option("--seed", o->seed)->required();
        cmd->add_option("--count", o->count, "sample size per horizon");
        cmd->add_option("--p", o->p);
        cmd->add_option("--directions", o->directions);
        cmd->add_option("--delta", o->delta);
        cmd->add_option("--threshold", o->threshold, "coverage needed to pass");
        cmd->add_option("--budget", o->budget, "calibration schedule budget");
        cmd->add_option("--p-max", o->p_max, "calibration max segments");
        cmd->add_option("--restarts", o->restarts);
        cmd->add_option("--iters", o->iters);
        cmd->add_flag("--no-refine", o->no_refine, "skip steering refinement");
        cmd->add_option("--step", o->step);
        cmd->add_option("--jobs", o->jobs);
        cmd->add_option("--x0", o->x0);
        cmd->add_flag("--json", o->json);
        cmd->add_option("--out", o->out);
        cmd->callback([o, &rc]() {
            const cr::ControlSystem sys = load_system(o->file);
            const auto x0 = to_doubles(resolve_x0(sys, o->x0));
            const auto times = double_list(o->times, "--times");
            if (times.empty()) throw cr::InputError("--times must be non-empty");
            if (!o->calibrate && o->C < 0)
                throw cr::InputError("growth: provide --C or --calibrate");

            Output out;
            out.json = o->json;
            out.out_path = o->out;
            out.add("cmd", "growth");
            out.add("file", o->file);
            out.add("N", o->N);
            out.add("times", o->times);
            out.add("seed", o->seed);
            out.add("count", o->count);
            out.add("p", o->p);
            out.add("directions", o->directions);
            out.add("delta", o->delta);
            out.add("threshold", o->threshold);

            double C = o->C;
            njson cal_json;
            if (o->calibrate) {
                cr::CalibrationConfig ccfg;
                ccfg.budget = o->budget;
                ccfg.p_max = o->p_max;
                ccfg.delta = o->delta;
                ccfg.step = o->step;
                ccfg.seed = o->seed;
                ccfg.jobs = o->jobs;
                const cr::GrowthCalibration cal2 =
                    cr::calibrate_growth_constant(sys, x0, o->N, times.front(), ccfg);
                C = cal2.C;
                out.add("budget", o->budget);
                out.add("calibrated_C", C);
                if (cal2.degenerate) out.add("calibration_note", cal2.diagnostic);
                cal_json = njson{{"C", cal2.C},
                                 {"min_ratio", cal2.min_ratio},
                                 {"worst_axis", cal2.worst_axis},
                                 {"axis_radius", cal2.axis_radius},
                                 {"evaluated", cal2.evaluated},
                                 {"degenerate", cal2.degenerate}};
            } else {
                out.add("C", C);
            }

            cr::GrowthConfig gcfg;
            gcfg.sampler.count = o->count;
            gcfg.sampler.p = o->p;
            gcfg.sampler.step = o->step;
            gcfg.directions = o->directions;
            gcfg.delta = o->delta;
            gcfg.refine = !o->no_refine;
            gcfg.steer = make_steer(o->p, o->restarts, o->iters, o->step, 0);
            gcfg.seed = o->seed;
            gcfg.jobs = o->jobs;
            const cr::GrowthReport rep = cr::growth_rate_test(sys, x0, o->N, C, times, gcfg);
            if (o->json) {
                njson res = growth_json(rep, o->threshold);
                if (!cal_json.is_null()) res["calibration"] = std::move(cal_json);
                out.emit_json(std::move(res));
            } else {
                out.csv(rep.to_csv());
            }
            rc = rep.passes(o->threshold) ? 0 : 1;
        });
    }

    // ------------------------------------------------------------ variation
    {
        struct Opts {
            std::string file, direction, times = "0.9,0.7,0.5,0.3", x0, out;
            int order = 1, p = 4, restarts = 8, iters = 250;
            double scale = 0.1, rho = 0.1, step = 1e-3;
            std::uint64_t seed = 0;
            bool json = false;
        };
        auto o = std::make_shared<Opts>();
        auto* cmd = app.add_subcommand("variation",
                                       "steer along x0 + c*t^k*v and check the residual order");
        cmd->add_option("file", o->file)->required();
        cmd->add_option("--direction", o->direction, "comma list, normalized internally")->required();
        cmd->add_option("--order", o->order)->required();
        cmd->add_option("--scale", o->scale)->required();
        cmd->add_option("--times", o->times);
        cmd->add_option("--seed", o->seed)->required();
        cmd->add_option("--rho", o->rho);
        cmd->add_option("--p", o->p);
        cmd->add_option("--restarts", o->restarts);
        cmd->add_option("--iters", o->iters);
        cmd->add_option("--step", o->step);
        cmd->add_option("--x0", o->x0);
        cmd->add_flag("--json", o->json);
        cmd->add_option("--out", o->out);
        cmd->callback([o, &rc]() {
            const cr::ControlSystem sys = load_system(o->file);
            const auto x0 = to_doubles(resolve_x0(sys, o->x0));
            std::vector<double> v = double_list(o->direction, "--direction");
            double norm = 0.0;
            for (double c : v) norm += c * c;
            if (norm <= 0) throw cr::InputError("--direction must be nonzero");
            norm = std::sqrt(norm);
            for (double& c : v) c /= norm;
            cr::VariationConfig vcfg;
            vcfg.rho = o->rho;
            vcfg.steer = make_steer(o->p, o->restarts, o->iters, o->step, 0);
            vcfg.seed = o->seed;
            const cr::VariationReport rep = cr::variation_check(
                sys, x0, v, o->order, o->scale, double_list(o->times, "--times"), vcfg);
            Output out;
            out.json = o->json;
            out.out_path = o->out;
            out.add("cmd", "variation");
            out.add("file", o->file);
            out.add("direction", join_doubles(v));
            out.add("order", o->order);
            out.add("scale", o->scale);
            out.add("times", o->times);
            out.add("seed", o->seed);
            out.add("rho", o->rho);
            if (o->json) {
                njson entries = njson::array();
                for (const auto& e : rep.entries)
                    entries.push_back(
                        {{"t", e.t}, {"target_dist", e.target_dist}, {"residual", e.residual}});
                out.emit_json(njson{{"pass", rep.pass},
                                    {"residual_ok", rep.residual_ok},
                                    {"slope_ok", rep.slope_ok},
                                    {"slope", rep.slope},
                                    {"slope_fitted", rep.slope_fitted},
                                    {"note", rep.note},
                                    {"entries", std::move(entries)}});
            } else {
                out.csv(rep.to_csv());
                std::printf("pass = %s  slope = %s%s\n", rep.pass ? "yes" : "no",
                            cr::fmt_double(rep.slope).c_str(),
                            rep.note.empty() ? "" : ("  (" + rep.note + ")").c_str());
            }
            rc = rep.pass ? 0 : 1;
        });
    }

    // ------------------------------------------------------------ order-scan
    {
        struct Opts {
            std::string file, direction, times = "0.9,0.7,0.5,0.3", x0, out;
            int kmax = 10, calib_count = 4000, calib_p = 6, jobs = 1;
            int p = 4, restarts = 8, iters = 250;
            double rho = 0.1, step = 1e-3;
            std::uint64_t seed = 0;
            bool json = false;
        };
        auto o = std::make_shared<Opts>();
        auto* cmd = app.add_subcommand("order-scan",
                                       "smallest verified variation order along a direction");
        cmd->add_option("file", o->file)->required();
        cmd->add_option("--direction", o->direction)->required();
        cmd->add_option("--kmax", o->kmax)->required();
        cmd->add_option("--seed", o->seed)->required();
        cmd->add_option("--times", o->times);
        cmd->add_option("--calib-count", o->calib_count);
        cmd->add_option("--calib-p", o->calib_p);
        cmd->add_option("--rho", o->rho);
        cmd->add_option("--p", o->p);
        cmd->add_option("--restarts", o->restarts);
        cmd->add_option("--iters", o->iters);
        cmd->add_option("--step", o->step);
        cmd->add_option("--jobs", o->jobs);
        cmd->add_option("--x0", o->x0);
        cmd->add_flag("--json", o->json);
        cmd->add_option("--out", o->out);
        cmd->callback([o, &rc]() {
            const cr::ControlSystem sys = load_system(o->file);
            const auto x0 = to_doubles(resolve_x0(sys, o->x0));
            std::vector<double> v = double_list(o->direction, "--direction");
            double norm = 0.0;
            for (double c : v) norm += c * c;
            if (norm <= 0) throw cr::InputError("--direction must be nonzero");
            norm = std::sqrt(norm);
            for (double& c : v) c /= norm;
            cr::OrderScanConfig cfg;
            cfg.times = double_list(o->times, "--times");
            cfg.var.rho = o->rho;
            cfg.var.steer = make_steer(o->p, o->restarts, o->iters, o->step, 0);
            cfg.calib_count = o->calib_count;
            cfg.calib_p = o->calib_p;
            cfg.seed = o->seed;
            cfg.jobs = o->jobs;
            const cr::OrderScanResult res = cr::order_scan(sys, x0, v, o->kmax, cfg);
            Output out;
            out.json = o->json;
            out.out_path = o->out;
            out.add("cmd", "order-scan");
            out.add("file", o->file);
            out.add("direction", join_doubles(v));
            out.add("kmax", o->kmax);
            out.add("seed", o->seed);
            if (o->json) {
                njson attempts = njson::array();
                for (const auto& a : res.attempts)
                    attempts.push_back(
                        {{"k", a.k}, {"scale", a.scale}, {"pass", a.report.pass}});
                out.emit_json(njson{{"order", res.order ? njson(*res.order) : njson(nullptr)},
                                    {"support", res.support},
                                    {"attempts", std::move(attempts)}});
            } else {
                out.echo();
                for (const auto& a : res.attempts)
                    std::printf("k = %d  scale = %s  pass = %s\n", a.k,
                                cr::fmt_double(a.scale).c_str(), a.report.pass ? "yes" : "no");
                if (res.order)
                    std::printf("order = %d\n", *res.order);
                else
                    std::puts("order = none");
            }
            rc = 0;
        });
    }

    // ----------------------------------------------------------- perturb-map
    {
        struct Opts {
            std::string fx, fy, target, x0, out;
            double t = 0.5, radius_hint = 0.0, step = 1e-3;
            int p = 4, restarts = 8, iters = 250;
            std::uint64_t seed = 0;
            bool json = false;
        };
        auto o = std::make_shared<Opts>();
        auto* cmd = app.add_subcommand("perturb-map",
                                       "steer one system to a target, replay the schedule under another");
        cmd->add_option("fileX", o->fx)->required();
        cmd->add_option("fileY", o->fy)->required();
        cmd->add_option("--target", o->target)->required();
        cmd->add_option("--t", o->t)->required();
        cmd->add_option("--seed", o->seed)->required();
        cmd->add_option("--radius-hint", o->radius_hint, "warn when the target leaves this ball");
        cmd->add_option("--p", o->p);
        cmd->add_option("--restarts", o->restarts);
        cmd->add_option("--iters", o->iters);
        cmd->add_option("--step", o->step);
        cmd->add_option("--x0", o->x0);
        cmd->add_flag("--json", o->json);
        cmd->add_option("--out", o->out);
        cmd->callback([o, &rc]() {
            const cr::ControlSystem X = load_system(o->fx);
            const cr::ControlSystem Y = load_system(o->fy);
            const auto x0 = to_doubles(resolve_x0(X, o->x0));
            const auto target = double_list(o->target, "--target");
            if (target.size() != x0.size()) throw cr::InputError("--target needs dim entries");
            const cr::SteerConfig stc = make_steer(o->p, o->restarts, o->iters, o->step, o->seed);
            const cr::PerturbMapResult pm =
                cr::perturbation_map(X, Y, x0, target, o->t, stc, o->radius_hint);
            Output out;
            out.json = o->json;
            out.out_path = o->out;
            out.add("cmd", "perturb-map");
            out.add("fileX", o->fx);
            out.add("fileY", o->fy);
            out.add("target", join_doubles(target));
            out.add("t", o->t);
            out.add("seed", o->seed);
            if (o->json) {
                out.emit_json(njson{{"x_endpoint", pm.x_endpoint},
                                    {"y_endpoint", pm.y_endpoint},
                                    {"distance", pm.distance},
                                    {"steer_residual", pm.steer_residual},
                                    {"inside_hint", pm.inside_hint},
                                    {"schedule", cr::format_schedule(pm.schedule)}});
            } else {
                out.echo();
                if (!pm.inside_hint) std::puts("note: target lies outside the advertised ball");
                std::printf("x = (%s)\ny = (%s)\ndistance = %s  steer_residual = %s\nschedule = %s\n",
                            join_doubles(pm.x_endpoint).c_str(), join_doubles(pm.y_endpoint).c_str(),
                            cr::fmt_double(pm.distance).c_str(),
                            cr::fmt_double(pm.steer_residual).c_str(),
                            cr::format_schedule(pm.schedule).c_str());
            }
            rc = 0;
        });
    }

    // ------------------------------------------------------- perturb-scaling
    {
        struct Opts {
            std::string fx, fy, times = "0.4,0.2,0.1,0.05", x0, out;
            int N = 2, targets = 20, p = 4, restarts = 6, iters = 200, jobs = 1;
            double C = 0.0, slope_min = -1.0, noise_floor = 1e-11, step = 1e-3;
            std::uint64_t seed = 0;
            bool json = false;
        };
        auto o = std::make_shared<Opts>();
        auto* cmd = app.add_subcommand("perturb-scaling",
                                       "replay-gap scaling law over a shrinking target ball");
        cmd->add_option("fileX", o->fx)->required();
        cmd->add_option("fileY", o->fy)->required();
        cmd->add_option("--N", o->N)->required();
        cmd->add_option("--C", o->C)->required();
        cmd->add_option("--times", o->times);
        cmd->add_option("--targets", o->targets, "targets per horizon");
        cmd->add_option("--seed", o->seed)->required();
        cmd->add_option("--slope-min", o->slope_min, "verdict: fitted slope must reach this");
        cmd->add_option("--noise-floor", o->noise_floor);
        cmd->add_option("--p", o->p);
        cmd->add_option("--restarts", o->restarts);
        cmd->add_option("--iters", o->iters);
        cmd->add_option("--step", o->step);
        cmd->add_option("--jobs", o->jobs);
        cmd->add_option("--x0", o->x0);
        cmd->add_flag("--json", o->json);
        cmd->add_option("--out", o->out);
        cmd->callback([o, &rc]() {
            const cr::ControlSystem X = load_system(o->fx);
            const cr::ControlSystem Y = load_system(o->fy);
            const auto x0 = resolve_x0(X, o->x0);
            cr::PerturbScalingConfig pcfg;
            pcfg.steer = make_steer(o->p, o->restarts, o->iters, o->step, 0);
            pcfg.noise_floor = o->noise_floor;
            pcfg.seed = o->seed;
            pcfg.jobs = o->jobs;
            const cr::PerturbReport rep = cr::perturb_scaling_experiment(
                X, Y, x0, o->N, o->C, double_list(o->times, "--times"), o->targets, pcfg);
            Output out;
            out.json = o->json;
            out.out_path = o->out;
            out.add("cmd", "perturb-scaling");
            out.add("fileX", o->fx);
            out.add("fileY", o->fy);
            out.add("N", o->N);
            out.add("C", o->C);
            out.add("times", o->times);
            out.add("targets", o->targets);
            out.add("seed", o->seed);
            if (o->json) {
                njson entries = njson::array();
                for (const auto& e : rep.entries)
                    entries.push_back({{"t", e.t},
                                       {"max_dist", e.max_dist},
                                       {"median_dist", e.median_dist},
                                       {"used_in_fit", e.used_in_fit}});
                out.emit_json(njson{{"slope", rep.slope},
                                    {"alpha", rep.alpha},
                                    {"t_min", rep.t_min},
                                    {"fit_residual", rep.fit_residual},
                                    {"degenerate", rep.degenerate},
                                    {"diagnostic", rep.diagnostic},
                                    {"entries", std::move(entries)},
                                    {"csv", rep.to_csv()}});
            } else {
                out.csv(rep.to_csv());
                std::printf("slope = %s  alpha = %s  degenerate = %s\n",
                            cr::fmt_double(rep.slope).c_str(), cr::fmt_double(rep.alpha).c_str(),
                            rep.degenerate ? "yes" : "no");
            }
            rc = 0;
            if (o->slope_min >= 0 && !rep.degenerate && rep.slope < o->slope_min) rc = 1;
        });
    }

    // --------------------------------------------------------- main-theorem
    {
        struct Opts {
            std::string fx, fy, times = "0.5,0.25,0.125", x0, out;
            int N = 2, count = 20000, p = 4, directions = 150, jobs = 1;
            int restarts = 10, iters = 300;
            double C = 0.0, delta = 0.05, threshold = 0.90, base_threshold = 0.95, step = 1e-3;
            std::uint64_t seed = 0;
            bool json = false;
        };
        auto o = std::make_shared<Opts>();
        auto* cmd = app.add_subcommand(
            "main-theorem", "growth transfer: base system at C, agreeing perturbation at C/2");
        cmd->add_option("fileX", o->fx)->required();
        cmd->add_option("fileY", o->fy)->required();
        cmd->add_option("--N", o->N)->required();
        cmd->add_option("--C", o->C)->required();
        cmd->add_option("--times", o->times);
        cmd->add_option("--seed", o->seed)->required();
        cmd->add_option("--threshold", o->threshold, "coverage the perturbed system must reach");
        cmd->add_option("--base-threshold", o->base_threshold, "coverage the base system must reach");
        cmd->add_option("--count", o->count);
        cmd->add_option("--p", o->p);
        cmd->add_option("--directions", o->directions);
        cmd->add_option("--delta", o->delta);
        cmd->add_option("--restarts", o->restarts);
        cmd->add_option("--iters", o->iters);
        cmd->add_option("--step", o->step);
        cmd->add_option("--jobs", o->jobs);
        cmd->add_option("--x0", o->x0);
        cmd->add_flag("--json", o->json);
        cmd->add_option("--out", o->out);
        cmd->callback([o, &rc]() {
            const cr::ControlSystem X = load_system(o->fx);
            const cr::ControlSystem Y = load_system(o->fy);
            const auto x0 = resolve_x0(X, o->x0);
            cr::GrowthConfig gcfg;
            gcfg.sampler.count = o->count;
            gcfg.sampler.p = o->p;
            gcfg.sampler.step = o->step;
            gcfg.directions = o->directions;
            gcfg.delta = o->delta;
            gcfg.steer = make_steer(o->p, o->restarts, o->iters, o->step, 0);
            gcfg.seed = o->seed;
            gcfg.jobs = o->jobs;
            const cr::GrowthReport rep = cr::main_theorem_experiment(
                X, Y, x0, o->N, o->C, double_list(o->times, "--times"), gcfg, o->base_threshold);
            Output out;
            out.json = o->json;
            out.out_path = o->out;
            out.add("cmd", "main-theorem");
            out.add("fileX", o->fx);
            out.add("fileY", o->fy);
            out.add("N", o->N);
            out.add("C", o->C);
            out.add("times", o->times);
            out.add("seed", o->seed);
            out.add("threshold", o->threshold);
            if (o->json) {
                out.emit_json(growth_json(rep, o->threshold));
            } else {
                out.csv(rep.to_csv());
            }
            rc = rep.passes(o->threshold) ? 0 : 1;
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const cr::BlowupError& e) {
        std::fprintf(stderr, "blow-up: %s\n", e.what());
        return 1;
    } catch (const cr::InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return rc;
}
