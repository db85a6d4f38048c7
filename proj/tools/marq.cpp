// marq: evaluate and invert the generalized Marcum functions from the shell.
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "marq/errors.hpp"
#include "marq/inversion.hpp"
#include "marq/marcum.hpp"
#include "marq/oracle.hpp"
#include "marq/scalar.hpp"

namespace {

enum class OutputFormat { json, csv, plain };

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* method_name(marq::Method m) {
    switch (m) {
        case marq::Method::series: return "series";
        case marq::Method::asymptotic: return "asymptotic";
        case marq::Method::quadrature: return "quadrature";
        case marq::Method::closed_form: return "closed_form";
    }
    return "?";
}

const char* method_name(marq::InvMethod m) {
    switch (m) {
        case marq::InvMethod::asymptotic: return "asymptotic";
        case marq::InvMethod::newton: return "newton";
        case marq::InvMethod::secant: return "secant";
        case marq::InvMethod::hybrid: return "hybrid";
    }
    return "?";
}

// Flat key/value result; values arrive preformatted so every format prints
// byte-identical floats (17 significant digits).
struct Result {
    std::vector<std::pair<std::string, std::string>> kv;
    void add(const std::string& k, const std::string& raw) { kv.emplace_back(k, raw); }
    void add_str(const std::string& k, const std::string& s) { add(k, "\"" + s + "\""); }
    void add_num(const std::string& k, double v) { add(k, fmt(v)); }
    void add_int(const std::string& k, long v) { add(k, std::to_string(v)); }

    void print_json() const {
        std::printf("{");
        for (std::size_t i = 0; i < kv.size(); ++i)
            std::printf("%s\"%s\": %s", i ? ", " : "", kv[i].first.c_str(),
                        kv[i].second.c_str());
        std::printf("}\n");
    }
    void print_csv() const {
        for (std::size_t i = 0; i < kv.size(); ++i)
            std::printf("%s%s", i ? "," : "", kv[i].first.c_str());
        std::printf("\n");
        for (std::size_t i = 0; i < kv.size(); ++i) {
            std::string v = kv[i].second;
            if (v.size() >= 2 && v.front() == '"') v = v.substr(1, v.size() - 2);
            std::printf("%s%s", i ? "," : "", v.c_str());
        }
        std::printf("\n");
    }
    void print_plain() const {
        for (const auto& [k, v] : kv) std::printf("%s = %s\n", k.c_str(), v.c_str());
    }
    void print(OutputFormat f) const {
        switch (f) {
            case OutputFormat::json: print_json(); break;
            case OutputFormat::csv: print_csv(); break;
            case OutputFormat::plain: print_plain(); break;
        }
    }
};

void add_report(Result& out, const marq::InversionReport& rep) {
    out.add_num("value", rep.value);
    out.add_str("method", method_name(rep.method));
    out.add_int("iterations", rep.iterations);
    out.add_num("residual", rep.residual);
    if (rep.zeta0) out.add_num("zeta0", *rep.zeta0);
    if (rep.zeta1) out.add_num("zeta1", *rep.zeta1);
}

marq::InvMethod parse_inv_method(const std::string& m) {
    if (m == "auto" || m == "hybrid") return marq::InvMethod::hybrid;
    if (m == "asymptotic") return marq::InvMethod::asymptotic;
    if (m == "iterative" || m == "newton") return marq::InvMethod::newton;
    if (m == "secant") return marq::InvMethod::secant;
    throw marq::domain_error("unknown method: " + m);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"generalized Marcum Q/P functions: evaluation and inversion"};
    app.require_subcommand(1);

    std::string output = "json";
    app.add_option("--output", output, "output format: json|csv|plain")
        ->check(CLI::IsMember({"json", "csv", "plain"}));

    double mu = 1.0, x = 0.0, y = 0.0, q0 = 0.0, q1 = 0.0;
    std::optional<double> tail_q, tail_p;
    std::string method = "auto";
    bool verify = false;

    auto* eval = app.add_subcommand("eval", "evaluate Q_mu(x,y) and P_mu(x,y)");
    eval->add_option("--mu", mu, "order")->required();
    eval->add_option("--x", x, "first argument")->required();
    eval->add_option("--y", y, "second argument")->required();
    eval->add_option("--method", method, "auto|series|asymptotic|quadrature");

    auto* invx = app.add_subcommand("invert-x", "solve Q_mu(x,y)=q (or P=p) for x");
    invx->add_option("--mu", mu)->required();
    invx->add_option("--y", y)->required();
    auto* qx = invx->add_option("--q", tail_q, "upper tail target");
    auto* px = invx->add_option("--p", tail_p, "lower tail target");
    qx->excludes(px);
    px->excludes(qx);
    invx->add_option("--method", method, "auto|asymptotic|iterative|newton|secant|hybrid");
    invx->add_flag("--verify", verify, "re-evaluate the tail at the result");

    auto* invy = app.add_subcommand("invert-y", "solve Q_mu(x,y)=q (or P=p) for y");
    invy->add_option("--mu", mu)->required();
    invy->add_option("--x", x)->required();
    auto* qy = invy->add_option("--q", tail_q, "upper tail target");
    auto* py = invy->add_option("--p", tail_p, "lower tail target");
    qy->excludes(py);
    py->excludes(qy);
    invy->add_option("--method", method, "auto|asymptotic|iterative|newton|secant|hybrid");
    invy->add_flag("--verify", verify, "re-evaluate the tail at the result");

    auto* twostep = app.add_subcommand(
        "two-step", "y0 from Q_mu(0,y0)=q0, then x1 from Q_mu(x1,y0)=q1");
    twostep->add_option("--mu", mu)->required();
    twostep->add_option("--q0", q0)->required();
    twostep->add_option("--q1", q1)->required();
    twostep->add_option("--method", method, "auto|asymptotic|iterative|newton|secant|hybrid");

    auto* ginv = app.add_subcommand("gamma-invert", "solve Q_mu(y)=q0 for y");
    ginv->add_option("--mu", mu)->required();
    ginv->add_option("--q0", q0)->required();

    auto* trans = app.add_subcommand("transition", "approximate median y of Q_mu(x,.)");
    trans->add_option("--mu", mu)->required();
    trans->add_option("--x", x)->required();

    std::string table_out;
    int which = 1;
    bool full_precision = false;
    auto* table = app.add_subcommand("table", "regenerate an inversion error table (CSV)");
    table->add_option("--which", which, "1 or 2")->check(CLI::Range(1, 2))->required();
    table->add_option("--out", table_out, "output path")->required();
    table->add_flag("--full-precision", full_precision, "17 significant digits");

    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);
    const OutputFormat ofmt = output == "csv"     ? OutputFormat::csv
                              : output == "plain" ? OutputFormat::plain
                                                  : OutputFormat::json;

    try {
        Result out;
        if (*eval) {
            out.add_str("command", "eval");
            out.add_num("mu", mu);
            out.add_num("x", x);
            out.add_num("y", y);
            marq::ProbabilityPair pr;
            if (method == "auto" || method == "series") {
                pr = marq::marcum(mu, x, y);
            } else if (method == "asymptotic") {
                pr = marq::marcum_asymptotic({mu, x, y, false});
            } else if (method == "quadrature") {
                pr = {marq::quad_q(mu, x, y), marq::quad_p(mu, x, y),
                      marq::Method::quadrature};
            } else {
                throw marq::domain_error("unknown method: " + method);
            }
            out.add_num("q", pr.q);
            out.add_num("p", pr.p);
            out.add_str("method", method_name(pr.method));
        } else if (*invx || *invy) {
            if (!tail_q && !tail_p)
                throw marq::domain_error("one of --q or --p is required");
            const marq::TailSpec tail = tail_q
                                            ? marq::TailSpec{marq::TailKind::Q, *tail_q}
                                            : marq::TailSpec{marq::TailKind::P, *tail_p};
            out.add_str("command", *invx ? "invert-x" : "invert-y");
            out.add_num("mu", mu);
            out.add_num(*invx ? "y" : "x", *invx ? y : x);
            out.add_str("tail", tail.kind == marq::TailKind::Q ? "q" : "p");
            out.add_num("target", tail.value);
            marq::InversionReport rep;
            const marq::InvMethod im = parse_inv_method(method);
            if (*invx) {
                rep = im == marq::InvMethod::hybrid
                          ? marq::invert_hybrid(mu, y, tail, marq::Axis::x)
                      : im == marq::InvMethod::asymptotic
                          ? marq::invert_x_asymptotic(mu, y, tail)
                          : marq::invert_x_iterative(mu, y, tail, im);
            } else {
                rep = im == marq::InvMethod::hybrid
                          ? marq::invert_hybrid(mu, x, tail, marq::Axis::y)
                      : im == marq::InvMethod::asymptotic
                          ? marq::invert_y_asymptotic(mu, x, tail)
                          : marq::invert_y_iterative(mu, x, tail, im);
            }
            add_report(out, rep);
            if (verify) {
                const marq::ProbabilityPair pr = *invx ? marq::marcum(mu, rep.value, y)
                                                       : marq::marcum(mu, x, rep.value);
                const double t = tail.kind == marq::TailKind::Q ? pr.q : pr.p;
                out.add_num("verified_tail", t);
                out.add_num("verified_residual", marq::relative_delta(t, tail.value));
            }
        } else if (*twostep) {
            const marq::TwoStepResult r =
                marq::two_step(mu, q0, q1, parse_inv_method(method));
            out.add_str("command", "two-step");
            out.add_num("mu", mu);
            out.add_num("q0", q0);
            out.add_num("q1", q1);
            out.add_num("y0", r.y0);
            out.add_num("delta0", r.delta0);
            out.add_num("x1", r.x1.value);
            out.add_str("method", method_name(r.x1.method));
            out.add_int("iterations", r.x1.iterations);
            out.add_num("delta1", r.x1.residual);
        } else if (*ginv) {
            const double y0 = marq::invert_gamma_q(mu, q0);
            out.add_str("command", "gamma-invert");
            out.add_num("mu", mu);
            out.add_num("q0", q0);
            out.add_num("y0", y0);
            out.add_num("residual",
                        marq::relative_delta(marq::gamma_ratios(mu, y0).q, q0));
        } else if (*trans) {
            out.add_str("command", "transition");
            out.add_num("mu", mu);
            out.add_num("x", x);
            out.add_num("y", marq::transition_y(mu, x));
        } else if (*table) {
            const std::vector<double> mus{10, 20, 50, 100, 200, 500, 1000};
            std::vector<marq::TableRow> rows;
            if (which == 1)
                rows = marq::run_table1(mus, {{1e-6, 0.9}, {1e-8, 0.999}, {0.4, 0.6}});
            else
                rows = marq::run_table2(mus, {1e-6, 0.5, 0.9999});
            std::ofstream os(table_out);
            if (!os) throw marq::domain_error("cannot open output file: " + table_out);
            marq::write_csv(os, rows, full_precision);
            out.add_str("command", "table");
            out.add_int("which", which);
            out.add_int("rows", static_cast<long>(rows.size()));
            out.add_str("out", table_out);
        }
        out.print(ofmt);
        return 0;
    } catch (const marq::convergence_error& e) {
        std::fprintf(stderr, "error: %s (best iterate %.17g after %d iterations)\n",
                     e.what(), e.best, e.iterations);
        return 3;
    } catch (const marq::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const marq::no_solution_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
