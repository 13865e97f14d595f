// sbm: command-line front end for rich scenario-based models.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rsbm/rsbm.hpp"

namespace {

using namespace rsbm;

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;
constexpr int kInternal = 3;

struct UsageError : Error {
    using Error::Error;
};

/// Parse failure tagged with its file.
struct SourceError : Error {
    using Error::Error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError("cannot read '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw UsageError("cannot write '" + path + "'");
    }
    out << text;
}

/// A model file plus optional object fragments (e.g. emitted patches).
Model load(const std::string& path, const std::vector<std::string>& fragments) {
    Model m;
    try {
        m = parse_model(read_file(path));
    } catch (const ParseError& e) {
        throw SourceError(path + ":" + e.what());
    }
    for (const auto& f : fragments) {
        try {
            for (auto& s : parse_objects(read_file(f), m.vars())) {
                m.add(std::move(s));
            }
        } catch (const ParseError& e) {
            throw SourceError(f + ":" + e.what());
        }
    }
    return m;
}

const ScenarioScript& script_object(const Model& m, const std::string& name) {
    const auto* o = m.find(name);
    if (o == nullptr || o->script() == nullptr) {
        throw UsageError("model has no scenario object named '" + name + "'");
    }
    return *o->script();
}

void print_trace(const SafetyResult& r) {
    std::cout << "violation: bad state reachable in " << r.trace.steps.size() << " step(s)\n";
    std::cout << "  start " << r.trace.initial << "\n";
    std::size_t n = 0;
    for (const auto& s : r.trace.steps) {
        std::cout << "  " << ++n << ". trigger " << to_string(s.assignment) << " -> " << s.state << "\n";
    }
}

struct Common {
    std::string path;
    std::vector<std::string> fragments;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("model", c.path, "Model file (.sbm)")->required();
    cmd->add_option("--with", c.fragments, "Extra object fragment files appended to the model");
}

} // namespace

int main(int argc, char** argv) {
    std::setvbuf(stdout, nullptr, _IOLBF, 0);
    CLI::App app{"Rich scenario-based modeling: run, extract, check and repair .sbm models"};
    app.require_subcommand(1);

    Common validate_opts;
    auto* validate = app.add_subcommand("validate", "Parse a model and run static checks");
    add_common(validate, validate_opts);

    Common run_opts;
    std::size_t steps = 100;
    std::uint64_t seed = 0;
    std::string policy = "first";
    std::string log_path;
    auto* run_cmd = app.add_subcommand("run", "Execute a model with solver-based event selection");
    add_common(run_cmd, run_opts);
    run_cmd->add_option("--steps", steps, "Maximum number of steps")->check(CLI::PositiveNumber);
    run_cmd->add_option("--seed", seed, "Seed for the random policy");
    run_cmd->add_option("--policy", policy, "Event selection policy")->check(CLI::IsMember({"first", "random"}));
    run_cmd->add_option("--log", log_path, "Write the event log as JSONL to this file");

    Common graph_opts;
    std::string object_name;
    bool composite = false;
    bool execution = false;
    bool simplify = false;
    std::string format = "dot";
    auto* graph = app.add_subcommand("graph", "Print an extracted or composite transition graph");
    add_common(graph, graph_opts);
    auto* obj_flag = graph->add_option("--object", object_name, "Object to extract");
    auto* comp_flag = graph->add_flag("--composite", composite, "Compose all objects");
    obj_flag->excludes(comp_flag);
    graph->add_flag("--execution", execution, "Restrict the composite to executable steps");
    graph->add_flag("--simplify", simplify, "Merge parallel edges and shrink guards");
    graph->add_option("--format", format, "Output format")->check(CLI::IsMember({"dot", "json"}));

    Common check_opts;
    std::string property;
    std::string trace_path;
    auto* check = app.add_subcommand("check", "Model-check a safety property object");
    add_common(check, check_opts);
    check->add_option("--property", property, "Property object marking bad states")->required();
    check->add_option("--trace", trace_path, "Write the counterexample as JSONL to this file");

    Common repair_opts;
    std::string repair_property;
    std::string out_path;
    bool verify = false;
    auto* repair_cmd = app.add_subcommand("repair", "Synthesize a blocking patch object");
    add_common(repair_cmd, repair_opts);
    repair_cmd->add_option("--property", repair_property, "Property object marking bad states")->required();
    repair_cmd->add_option("--out", out_path, "Write the patch object to this file");
    repair_cmd->add_flag("--verify", verify, "Check the patch against the original model");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*validate) {
            Model m = load(validate_opts.path, validate_opts.fragments);
            for (const auto& o : m.objects()) {
                if (const auto* s = o.script()) {
                    collect_predicates(*s);
                }
            }
            std::cout << "ok: " << m.objects().size() << " object(s) over " << m.vars().size() << " variable(s)\n";
            return kOk;
        }
        if (*run_cmd) {
            Model m = load(run_opts.path, run_opts.fragments);
            ExecutionConfig cfg{steps, seed, parse_policy(policy)};
            EventLog log = run(m, cfg);
            std::string text = log_jsonl(log);
            if (log_path.empty()) {
                std::cout << text;
                std::cerr << "stopped: " << to_string(log.stop) << " after " << log.entries.size() << " step(s)\n";
            } else {
                write_file(log_path, text);
                std::cout << "stopped: " << to_string(log.stop) << " after " << log.entries.size() << " step(s)\n";
            }
            return kOk;
        }
        if (*graph) {
            Model m = load(graph_opts.path, graph_opts.fragments);
            ObjectGraph g;
            if (composite) {
                ComposeOptions opts;
                opts.simplify = true;
                g = compose_all(m, opts);
                if (execution) {
                    g = execution_graph(g, m.vars());
                }
                if (simplify) {
                    g = simplify_graph(g, m.vars());
                }
            } else {
                if (object_name.empty()) {
                    if (m.objects().size() != 1) {
                        throw UsageError("choose an object with --object NAME or use --composite");
                    }
                    object_name = m.objects().front().name;
                }
                const auto* o = m.find(object_name);
                if (o == nullptr) {
                    throw UsageError("model has no object named '" + object_name + "'");
                }
                g = o->script() != nullptr ? extract_graph(*o->script(), m.vars()) : *o->graph();
                if (simplify) {
                    g = simplify_graph(g, m.vars());
                }
                if (execution) {
                    g = execution_graph(g, m.vars());
                }
            }
            std::cout << (format == "json" ? graph_json(g).dump(2) + "\n" : graph_dot(g));
            return kOk;
        }
        if (*check) {
            Model m = load(check_opts.path, check_opts.fragments);
            const auto& prop = script_object(m, property);
            auto r = check_safety(m.without(property), prop);
            if (!trace_path.empty()) {
                write_file(trace_path, trace_jsonl(r.trace));
            }
            if (r.safe()) {
                std::cout << "safe: no bad state of '" << property << "' is reachable\n";
                return kOk;
            }
            print_trace(r);
            return kViolation;
        }
        if (*repair_cmd) {
            Model m = load(repair_opts.path, repair_opts.fragments);
            const auto& prop = script_object(m, repair_property);
            Model base = m.without(repair_property);
            RepairResult r = repair(base, prop);
            const Patch& patch = *r.patch;
            if (r.check.safe()) {
                std::cout << "notice: model already satisfies '" << repair_property << "'; the patch is the identity\n";
            } else {
                print_trace(r.check);
                std::cout << "bad set:\n";
                for (const auto& q : patch.bad.states) {
                    std::cout << "  " << q << "\n";
                }
                std::cout << "cut edges:\n";
                for (const auto& e : patch.cut) {
                    std::cout << "  " << e.from << " -> " << e.to << " when " << to_infix(e.guard) << "\n";
                }
            }
            for (const auto& t : patch.new_deadlocks) {
                std::cout << "warning: blocking leaves tracker state " << t << " without enabled assignments\n";
            }
            std::string text = emit_script(patch.tracker, m.vars());
            if (out_path.empty()) {
                std::cout << text;
            } else {
                write_file(out_path, text);
                std::cout << "patch written to " << out_path << "\n";
            }
            if (verify) {
                auto rep = verify_patch(base, patch, prop, {}, false);
                std::cout << "verify: safe " << (rep.safe ? "yes" : "no") << ", no new deadlocks "
                          << (rep.no_new_deadlocks ? "yes" : "no") << ", runs preserved "
                          << (rep.runs_preserved ? "yes" : "no") << "\n";
                for (const auto& w : rep.witnesses) {
                    std::cout << "  " << w << "\n";
                }
                if (!rep.ok()) {
                    return kInternal;
                }
            }
            return kOk;
        }
    } catch (const SourceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const InvalidPropertyError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const UnrepairableError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kViolation;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return kUsage;
}
