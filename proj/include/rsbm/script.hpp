#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "rsbm/error.hpp"
#include "rsbm/formula.hpp"
#include "rsbm/object_graph.hpp"

namespace rsbm {

struct SourceLoc {
    std::size_t line = 0;
    std::size_t column = 0;
};

struct Statement;
using Body = std::vector<Statement>;

namespace stmt {

struct Sync {
    Formula request = Formula::bottom();
    Formula waitfor = Formula::bottom();
    Formula block = Formula::bottom();
    bool bad = false;
    SourceLoc loc;
};

struct If {
    Formula cond;
    Body then_body;
    Body else_body;
    SourceLoc loc;
};

struct Loop {
    Body body;
    SourceLoc loc;
};

/// `state NAME:` marks a jump target; a label directly before a sync also
/// names that sync's state.
struct Label {
    std::string name;
    SourceLoc loc;
};

struct Goto {
    std::string label;
    SourceLoc loc;
};

struct End {
    SourceLoc loc;
};

} // namespace stmt

struct Statement {
    std::variant<stmt::Sync, stmt::If, stmt::Loop, stmt::Label, stmt::Goto, stmt::End> node;
};

/// Flat control-flow form of a script. Every synchronization point is a
/// `Sync` instruction; all `End` instructions denote one absorbing state.
struct Instr {
    enum class Op { Sync, Branch, Jump, End };
    Op op = Op::End;
    Formula request = Formula::bottom();
    Formula waitfor = Formula::bottom();
    Formula block = Formula::bottom();
    bool bad = false;
    Formula cond = Formula::top(); ///< Branch: fall through when true.
    std::size_t target = 0;        ///< Branch (when false) and Jump.
    std::string name;              ///< Sync: state name.
    SourceLoc loc;
};

inline constexpr const char* kEndState = "end";

/// Parsed scenario object. Construction compiles the body and enforces the
/// static rules: defined and unique labels, no sync-free cycle, and no
/// condition evaluated before the first synchronization.
class ScenarioScript {
public:
    ScenarioScript(std::string name, Body body, SourceLoc loc = {})
        : name_(std::move(name)), body_(std::move(body)), loc_(loc) {
        compile();
        validate();
    }

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const Body& body() const { return body_; }
    [[nodiscard]] const std::vector<Instr>& program() const { return program_; }
    [[nodiscard]] std::size_t end_pc() const { return program_.size() - 1; }

    /// State name of a sync or end instruction.
    [[nodiscard]] std::string state_name(std::size_t pc) const {
        const auto& ins = program_.at(pc);
        if (ins.op == Instr::Op::End) {
            return kEndState;
        }
        return ins.name;
    }

    /// Follows branches and jumps from `pc` to the next sync or end, deciding
    /// conditions with `a`.
    [[nodiscard]] std::size_t settle(std::size_t pc, const Assignment* a) const {
        for (std::size_t guard = 0; guard <= program_.size(); ++guard) {
            const auto& ins = program_.at(pc);
            switch (ins.op) {
            case Instr::Op::Sync: return pc;
            case Instr::Op::End: return end_pc();
            case Instr::Op::Jump: pc = ins.target; break;
            case Instr::Op::Branch:
                if (a == nullptr) {
                    throw ParseError("condition evaluated before the first sync", ins.loc.line, ins.loc.column);
                }
                pc = evaluate(ins.cond, *a) ? pc + 1 : ins.target;
                break;
            }
        }
        throw std::logic_error("sync-free cycle in '" + name_ + "'");
    }

    [[nodiscard]] std::size_t initial_pc() const { return settle(0, nullptr); }

private:
    void compile() {
        emit(body_);
        Instr end;
        end.op = Instr::Op::End;
        end.loc = loc_;
        program_.push_back(std::move(end));
        for (auto [index, label] : pending_gotos_) {
            auto it = labels_.find(label.label);
            if (it == labels_.end()) {
                throw ParseError("undefined label '" + label.label + "'", label.loc.line, label.loc.column);
            }
            program_[index].target = it->second;
        }
        std::size_t ordinal = 0;
        std::set<std::string> used;
        for (std::size_t pc = 0; pc < program_.size(); ++pc) {
            auto& ins = program_[pc];
            if (ins.op != Instr::Op::Sync) {
                continue;
            }
            if (ins.name.empty()) {
                ins.name = "s" + std::to_string(ordinal);
            }
            ++ordinal;
            if (!used.insert(ins.name).second || ins.name == kEndState) {
                throw ParseError("duplicate state name '" + ins.name + "'", ins.loc.line, ins.loc.column);
            }
        }
    }

    void emit(const Body& body) {
        std::optional<std::string> pending_label;
        for (const auto& s : body) {
            std::visit(
                [&](const auto& node) {
                    using T = std::decay_t<decltype(node)>;
                    if constexpr (std::is_same_v<T, stmt::Label>) {
                        if (!labels_.emplace(node.name, program_.size()).second) {
                            throw ParseError("duplicate label '" + node.name + "'", node.loc.line, node.loc.column);
                        }
                        pending_label = node.name;
                        return;
                    } else if constexpr (std::is_same_v<T, stmt::Sync>) {
                        Instr ins;
                        ins.op = Instr::Op::Sync;
                        ins.request = canonicalize(node.request);
                        ins.waitfor = canonicalize(node.waitfor);
                        ins.block = canonicalize(node.block);
                        ins.bad = node.bad;
                        ins.loc = node.loc;
                        if (pending_label) {
                            ins.name = *pending_label;
                        }
                        program_.push_back(std::move(ins));
                    } else if constexpr (std::is_same_v<T, stmt::If>) {
                        std::size_t branch = program_.size();
                        Instr ins;
                        ins.op = Instr::Op::Branch;
                        ins.cond = canonicalize(node.cond);
                        ins.loc = node.loc;
                        program_.push_back(std::move(ins));
                        emit(node.then_body);
                        if (node.else_body.empty()) {
                            program_[branch].target = program_.size();
                        } else {
                            std::size_t jump = program_.size();
                            Instr j;
                            j.op = Instr::Op::Jump;
                            j.loc = node.loc;
                            program_.push_back(std::move(j));
                            program_[branch].target = program_.size();
                            emit(node.else_body);
                            program_[jump].target = program_.size();
                        }
                    } else if constexpr (std::is_same_v<T, stmt::Loop>) {
                        std::size_t start = program_.size();
                        emit(node.body);
                        Instr j;
                        j.op = Instr::Op::Jump;
                        j.target = start;
                        j.loc = node.loc;
                        program_.push_back(std::move(j));
                    } else if constexpr (std::is_same_v<T, stmt::Goto>) {
                        Instr j;
                        j.op = Instr::Op::Jump;
                        j.loc = node.loc;
                        pending_gotos_.emplace_back(program_.size(), node);
                        program_.push_back(std::move(j));
                    } else if constexpr (std::is_same_v<T, stmt::End>) {
                        Instr e;
                        e.op = Instr::Op::End;
                        e.loc = node.loc;
                        program_.push_back(std::move(e));
                    }
                    pending_label.reset();
                },
                s.node);
        }
    }

    [[nodiscard]] std::vector<std::size_t> successors(std::size_t pc) const {
        const auto& ins = program_[pc];
        switch (ins.op) {
        case Instr::Op::Branch: return {pc + 1, ins.target};
        case Instr::Op::Jump: return {ins.target};
        default: return {};
        }
    }

    void validate() const {
        // Cycles through branches and jumps only would never reach a sync.
        std::vector<int> color(program_.size(), 0);
        auto dfs = [&](auto&& self, std::size_t pc) -> void {
            color[pc] = 1;
            for (auto next : successors(pc)) {
                if (color[next] == 1) {
                    const auto& loc = program_[next].loc;
                    throw ParseError("loop without a sync in '" + name_ + "'", loc.line, loc.column);
                }
                if (color[next] == 0) {
                    self(self, next);
                }
            }
            color[pc] = 2;
        };
        for (std::size_t pc = 0; pc < program_.size(); ++pc) {
            if (color[pc] == 0) {
                dfs(dfs, pc);
            }
        }
        std::vector<bool> seen(program_.size(), false);
        std::vector<std::size_t> work{0};
        while (!work.empty()) {
            std::size_t pc = work.back();
            work.pop_back();
            if (seen[pc]) {
                continue;
            }
            seen[pc] = true;
            if (program_[pc].op == Instr::Op::Branch) {
                const auto& loc = program_[pc].loc;
                throw ParseError("condition evaluated before the first sync in '" + name_ + "'", loc.line,
                                 loc.column);
            }
            for (auto next : successors(pc)) {
                work.push_back(next);
            }
        }
    }

    std::string name_;
    Body body_;
    SourceLoc loc_;
    std::vector<Instr> program_;
    std::map<std::string, std::size_t> labels_;
    std::vector<std::pair<std::size_t, stmt::Goto>> pending_gotos_;
};

struct ModelObject {
    std::string name;
    std::variant<ScenarioScript, ObjectGraph> body;

    [[nodiscard]] const ScenarioScript* script() const { return std::get_if<ScenarioScript>(&body); }
    [[nodiscard]] const ObjectGraph* graph() const { return std::get_if<ObjectGraph>(&body); }
};

/// A collection of scenario objects over one variable set.
class Model {
public:
    Model() = default;
    explicit Model(VarSet vars) : vars_(std::move(vars)) {}

    [[nodiscard]] const VarSet& vars() const { return vars_; }
    [[nodiscard]] const std::vector<ModelObject>& objects() const { return objects_; }

    void add(ScenarioScript script) {
        std::string name = script.name();
        add_object(ModelObject{std::move(name), std::move(script)});
    }
    void add(ObjectGraph graph) {
        std::string name = graph.name();
        add_object(ModelObject{std::move(name), std::move(graph)});
    }

    [[nodiscard]] const ModelObject* find(const std::string& name) const {
        for (const auto& o : objects_) {
            if (o.name == name) {
                return &o;
            }
        }
        return nullptr;
    }

    [[nodiscard]] const ModelObject& at(const std::string& name) const {
        if (const auto* o = find(name)) {
            return *o;
        }
        throw Error("model has no object named '" + name + "'");
    }

    /// Copy of the model without the named object.
    [[nodiscard]] Model without(const std::string& name) const {
        Model m(vars_);
        for (const auto& o : objects_) {
            if (o.name != name) {
                m.objects_.push_back(o);
            }
        }
        return m;
    }

private:
    void add_object(ModelObject o) {
        if (find(o.name) != nullptr) {
            throw Error("duplicate object name '" + o.name + "'");
        }
        objects_.push_back(std::move(o));
    }

    VarSet vars_;
    std::vector<ModelObject> objects_;
};

} // namespace rsbm
