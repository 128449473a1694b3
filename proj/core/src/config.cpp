#include "varibc/config.hpp"

#include "varibc/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace varibc {

std::string to_string(BcMode mode) {
    switch (mode) {
        case BcMode::fixed: return "fixed";
        case BcMode::variable: return "variable";
        case BcMode::both: return "both";
    }
    return "variable";
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

namespace {

// ---- document model ------------------------------------------------------

struct Value {
    enum Kind { number, boolean, string, array } kind = number;
    double num = 0.0;
    bool flag = false;
    std::string str;
    std::vector<Value> items;
    std::size_t line = 0, column = 0;
};

struct Entry {
    std::string section;
    std::string key;
    Value value;
};

class Parser {
public:
    explicit Parser(const std::string& text) : s_(text) {}

    std::vector<Entry> parse() {
        std::vector<Entry> out;
        std::string section;
        while (true) {
            skip_blank_lines();
            if (eof()) break;
            if (peek() == '[') {
                get();
                skip_spaces();
                section = identifier();
                skip_spaces();
                expect(']');
                end_of_line();
                continue;
            }
            Entry e;
            e.section = section;
            e.key = identifier();
            skip_spaces();
            expect('=');
            skip_spaces();
            e.value = value();
            end_of_line();
            out.push_back(std::move(e));
        }
        return out;
    }

private:
    bool eof() const { return i_ >= s_.size(); }
    char peek() const { return eof() ? '\0' : s_[i_]; }
    char get() {
        const char c = s_[i_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    [[noreturn]] void fail(const std::string& what) const { throw ConfigParseError(line_, col_, what); }
    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        get();
    }
    void skip_spaces() {
        while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) get();
    }
    void skip_comment() {
        if (peek() == '#')
            while (!eof() && peek() != '\n') get();
    }
    void skip_blank_lines() {
        while (!eof()) {
            skip_spaces();
            skip_comment();
            if (peek() == '\n') get();
            else break;
        }
    }
    // spaces, comments and newlines inside arrays
    void skip_all() {
        while (!eof()) {
            skip_spaces();
            skip_comment();
            if (peek() == '\n') get();
            else break;
        }
    }
    void end_of_line() {
        skip_spaces();
        skip_comment();
        if (eof()) return;
        if (peek() != '\n') fail("unexpected text after value");
        get();
    }
    std::string identifier() {
        std::string id;
        if (!(std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_')) fail("expected a key name");
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) id += get();
        return id;
    }
    Value value() {
        Value v;
        v.line = line_;
        v.column = col_;
        const char c = peek();
        if (c == '"') {
            v.kind = Value::string;
            get();
            while (true) {
                if (eof() || peek() == '\n') fail("unterminated string");
                char ch = get();
                if (ch == '"') break;
                if (ch == '\\') {
                    if (eof()) fail("unterminated string");
                    const char esc = get();
                    switch (esc) {
                        case '"': ch = '"'; break;
                        case '\\': ch = '\\'; break;
                        case 'n': ch = '\n'; break;
                        case 't': ch = '\t'; break;
                        default: fail(std::string("unknown escape \\") + esc);
                    }
                }
                v.str += ch;
            }
        } else if (c == '[') {
            v.kind = Value::array;
            get();
            skip_all();
            while (peek() != ']') {
                v.items.push_back(value());
                skip_all();
                if (peek() == ',') {
                    get();
                    skip_all();
                } else if (peek() != ']') {
                    fail("expected ',' or ']'");
                }
            }
            get();
        } else if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::string word = identifier();
            if (word == "true" || word == "false") {
                v.kind = Value::boolean;
                v.flag = word == "true";
            } else {
                throw ConfigParseError(v.line, v.column, "unexpected word '" + word + "' (strings need quotes)");
            }
        } else {
            std::string tok;
            while (!eof() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.' ||
                              peek() == '-' || peek() == '+' || peek() == 'e' || peek() == 'E' || peek() == '_'))
                tok += get();
            tok.erase(std::remove(tok.begin(), tok.end(), '_'), tok.end());
            char* end = nullptr;
            v.num = tok.empty() ? 0.0 : std::strtod(tok.c_str(), &end);
            if (tok.empty() || end != tok.c_str() + tok.size() || !std::isfinite(v.num))
                throw ConfigParseError(v.line, v.column, "malformed value");
        }
        return v;
    }

    const std::string& s_;
    std::size_t i_ = 0, line_ = 1, col_ = 1;
};

// ---- typed access ----------------------------------------------------------

std::string where(const Entry& e) {
    return " (line " + std::to_string(e.value.line) + ")";
}

struct Ctx {
    const Entry* entry;
    std::string name;  // key for error messages

    [[noreturn]] void bad(const std::string& reason) const {
        throw ConfigValidationError(name, reason + where(*entry));
    }
};

double as_number(const Value& v, const Ctx& c) {
    if (v.kind != Value::number) c.bad("expected a number");
    return v.num;
}
int as_int(const Value& v, const Ctx& c) {
    const double x = as_number(v, c);
    if (x != std::floor(x) || std::abs(x) > 1e9) c.bad("expected an integer");
    return static_cast<int>(x);
}
bool as_bool(const Value& v, const Ctx& c) {
    if (v.kind != Value::boolean) c.bad("expected true or false");
    return v.flag;
}
const std::string& as_string(const Value& v, const Ctx& c) {
    if (v.kind != Value::string) c.bad("expected a quoted string");
    return v.str;
}
const std::vector<Value>& as_array(const Value& v, const Ctx& c) {
    if (v.kind != Value::array) c.bad("expected an array");
    return v.items;
}
Point as_point(const Value& v, const Ctx& c) {
    const auto& a = as_array(v, c);
    if (a.size() != 2) c.bad("expected [x, y]");
    return {as_number(a[0], c), as_number(a[1], c)};
}
std::vector<Point> as_points(const Value& v, const Ctx& c) {
    std::vector<Point> out;
    for (const auto& item : as_array(v, c)) out.push_back(as_point(item, c));
    return out;
}
std::vector<Polygon> as_polygons(const Value& v, const Ctx& c) {
    std::vector<Polygon> out;
    for (const auto& item : as_array(v, c)) out.push_back(as_points(item, c));
    return out;
}

// ---- quantity grammar -------------------------------------------------------

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, const std::string& context) {
    const std::string t = trim(text);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v))
        throw ConfigValidationError(context, "malformed number '" + t + "'");
    return v;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string quantity_text(const QuantityRef& q) {
    std::string s;
    if (q.factor == -1.0) s = "-";
    else if (q.factor != 1.0) s = fmt(q.factor) + "*";
    s += to_string(q.kind);
    if (q.kind != QuantityKind::volume_fraction && q.kind != QuantityKind::path_error) {
        s += "@" + std::to_string(q.step);
        if (q.load_case != 0) s += "#" + std::to_string(q.load_case + 1);
    }
    return s;
}

std::string constraint_text(const ConstraintSpec& c) {
    return quantity_text(c.quantity) + (c.upper ? " < " : " > ") + fmt(c.bound);
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out + "\"";
}

}  // namespace

QuantityRef parse_quantity(const std::string& text) {
    std::string t = trim(text);
    QuantityRef q;
    if (!t.empty() && t[0] == '-') {
        q.factor = -1.0;
        t = trim(t.substr(1));
    } else if (const auto star = t.find('*'); star != std::string::npos) {
        q.factor = parse_number(t.substr(0, star), "quantity");
        t = trim(t.substr(star + 1));
    }
    std::string name = t, step, lc;
    if (const auto hash = name.find('#'); hash != std::string::npos) {
        lc = name.substr(hash + 1);
        name = name.substr(0, hash);
    }
    if (const auto at = name.find('@'); at != std::string::npos) {
        step = name.substr(at + 1);
        name = name.substr(0, at);
    }
    name = trim(name);
    bool found = false;
    for (auto k : {QuantityKind::u_out, QuantityKind::f_in, QuantityKind::f_p, QuantityKind::volume_fraction,
                   QuantityKind::path_error})
        if (to_string(k) == name) {
            q.kind = k;
            found = true;
        }
    if (!found) throw ConfigValidationError("quantity", "unknown quantity '" + name + "'");
    const bool stepped = q.kind != QuantityKind::volume_fraction && q.kind != QuantityKind::path_error;
    if (stepped) {
        if (step.empty()) throw ConfigValidationError("quantity", "'" + name + "' needs a step, e.g. " + name + "@1");
        const double s = parse_number(step, "quantity");
        if (s != std::floor(s) || s < 1) throw ConfigValidationError("quantity", "step must be a positive integer");
        q.step = static_cast<int>(s);
        if (!lc.empty()) {
            const double c = parse_number(lc, "quantity");
            if (c != std::floor(c) || c < 1) throw ConfigValidationError("quantity", "load case must be >= 1");
            q.load_case = static_cast<int>(c) - 1;
        }
    } else if (!step.empty() || !lc.empty()) {
        throw ConfigValidationError("quantity", "'" + name + "' takes no step or load case");
    }
    return q;
}

std::vector<ConstraintSpec> parse_constraint(const std::string& text) {
    const auto op = text.find_first_of("<>");
    if (op == std::string::npos || text.find_first_of("<>", op + 1) != std::string::npos)
        throw ConfigValidationError("constraints", "expected '<quantity> < bound' or '> bound' in '" + text + "'");
    std::string lhs = trim(text.substr(0, op));
    const double bound = parse_number(text.substr(op + 1), "constraints");
    const bool upper = text[op] == '<';
    if (lhs.size() >= 2 && lhs.front() == '|' && lhs.back() == '|') {
        if (!upper) throw ConfigValidationError("constraints", "absolute-value bounds must be upper bounds");
        QuantityRef q = parse_quantity(lhs.substr(1, lhs.size() - 2));
        QuantityRef neg = q;
        neg.factor = -q.factor;
        return {{q, bound, true}, {neg, bound, true}};
    }
    return {{parse_quantity(lhs), bound, upper}};
}

namespace {

// ---- key table ---------------------------------------------------------------

using Setter = std::function<void(RunConfig&, const Value&, const Ctx&)>;

struct KeyDef {
    std::string section;
    Setter set;
};

NeoHookeanVariant parse_variant(const std::string& s, const Ctx& c) {
    if (s == "consistent") return NeoHookeanVariant::consistent;
    if (s == "printed") return NeoHookeanVariant::printed;
    c.bad("expected \"consistent\" or \"printed\"");
}

const std::map<std::string, KeyDef>& key_table() {
    static const std::map<std::string, KeyDef> table = [] {
        std::map<std::string, KeyDef> t;
        auto num = [&](const std::string& sec, const std::string& key, std::function<double&(RunConfig&)> ref) {
            t[key] = {sec, [ref](RunConfig& r, const Value& v, const Ctx& c) { ref(r) = as_number(v, c); }};
        };
        auto integer = [&](const std::string& sec, const std::string& key, std::function<int&(RunConfig&)> ref) {
            t[key] = {sec, [ref](RunConfig& r, const Value& v, const Ctx& c) { ref(r) = as_int(v, c); }};
        };
        auto point = [&](const std::string& sec, const std::string& key, std::function<Point&(RunConfig&)> ref) {
            t[key] = {sec, [ref](RunConfig& r, const Value& v, const Ctx& c) { ref(r) = as_point(v, c); }};
        };

        // top level
        t["problem"] = {"", [](RunConfig&, const Value&, const Ctx&) {}};  // handled first
        t["name"] = {"", [](RunConfig& r, const Value& v, const Ctx& c) { r.problem.name = as_string(v, c); }};
        t["mode"] = {"", [](RunConfig& r, const Value& v, const Ctx& c) {
                         const std::string& m = as_string(v, c);
                         if (m == "fixed") r.mode = BcMode::fixed;
                         else if (m == "variable") r.mode = BcMode::variable;
                         else if (m == "both") r.mode = BcMode::both;
                         else c.bad("expected \"fixed\", \"variable\" or \"both\"");
                     }};
        t["output_dir"] = {"", [](RunConfig& r, const Value& v, const Ctx& c) { r.output_dir = as_string(v, c); }};
        t["trace_solver"] = {"", [](RunConfig& r, const Value& v, const Ctx& c) { r.trace_solver = as_bool(v, c); }};
        integer("", "dump_every", [](RunConfig& r) -> int& { return r.dump_every; });
        integer("", "replay_steps", [](RunConfig& r) -> int& { return r.replay_steps; });

        // mesh and geometry
        num("mesh", "element_size", [](RunConfig& r) -> double& { return r.problem.geometry.element_size; });
        num("mesh", "thickness", [](RunConfig& r) -> double& { return r.problem.thickness; });
        t["file"] = {"mesh", [](RunConfig& r, const Value& v, const Ctx& c) { r.problem.mesh_file = as_string(v, c); }};
        t["outline"] = {"geometry", [](RunConfig& r, const Value& v, const Ctx& c) {
                            r.problem.geometry.outline = as_points(v, c);
                        }};
        t["holes"] = {"geometry", [](RunConfig& r, const Value& v, const Ctx& c) {
                          r.problem.geometry.holes = as_polygons(v, c);
                      }};
        t["regions"] = {"geometry", [](RunConfig& r, const Value& v, const Ctx& c) {
                            std::vector<NondesignRegion> regions;
                            for (const auto& item : as_array(v, c)) {
                                const auto& pair = as_array(item, c);
                                if (pair.size() != 2) c.bad("each region is [\"solid\"|\"void\", [[x, y], ...]]");
                                const std::string& kind = as_string(pair[0], c);
                                NondesignRegion reg;
                                if (kind == "solid") reg.kind = RegionKind::solid;
                                else if (kind == "void") reg.kind = RegionKind::void_;
                                else c.bad("region kind must be \"solid\" or \"void\"");
                                reg.polygon = as_points(pair[1], c);
                                regions.push_back(std::move(reg));
                            }
                            r.problem.geometry.nondesign_regions = std::move(regions);
                        }};

        // material
        num("material", "nu", [](RunConfig& r) -> double& { return r.problem.nu; });
        t["variant"] = {"material", [](RunConfig& r, const Value& v, const Ctx& c) {
                            r.problem.variant = parse_variant(as_string(v, c), c);
                        }};
        num("material", "E0", [](RunConfig& r) -> double& { return r.problem.projection.E0; });
        num("material", "E_min", [](RunConfig& r) -> double& { return r.problem.projection.E_min; });
        num("material", "p_simp", [](RunConfig& r) -> double& { return r.problem.projection.p_simp; });
        num("material", "rho0", [](RunConfig& r) -> double& { return r.problem.projection.rho0; });
        num("material", "E_s", [](RunConfig& r) -> double& { return r.problem.projection.E_s; });
        num("material", "nu_s", [](RunConfig& r) -> double& { return r.problem.projection.nu_s; });
        num("material", "t_s", [](RunConfig& r) -> double& { return r.problem.projection.t_s; });

        // projection
        num("projection", "b", [](RunConfig& r) -> double& { return r.problem.projection.b; });
        num("projection", "P", [](RunConfig& r) -> double& { return r.problem.projection.P; });
        num("projection", "Q", [](RunConfig& r) -> double& { return r.problem.projection.Q; });
        num("projection", "r", [](RunConfig& r) -> double& { return r.problem.projection.r; });
        num("projection", "r_min", [](RunConfig& r) -> double& { return r.problem.projection.r_min; });
        num("projection", "beta", [](RunConfig& r) -> double& { return r.problem.projection.beta; });

        // solver
        num("solver", "residual_tol", [](RunConfig& r) -> double& { return r.problem.solver.tol_residual; });
        integer("solver", "max_corrector_iterations",
                [](RunConfig& r) -> int& { return r.problem.solver.max_corrector_iters; });
        integer("solver", "max_bisections", [](RunConfig& r) -> int& { return r.problem.solver.max_bisections; });
        integer("solver", "steps", [](RunConfig& r) -> int& { return r.problem.solver.steps; });

        // design variables and actuation
        t["supports"] = {"design", [](RunConfig& r, const Value& v, const Ctx& c) {
                             r.problem.supports = as_points(v, c);
                         }};
        t["support_fixed"] = {"design", [](RunConfig& r, const Value& v, const Ctx& c) {
                                  r.problem.support_fixed.clear();
                                  for (const auto& item : as_array(v, c))
                                      r.problem.support_fixed.push_back(as_bool(item, c));
                              }};
        point("design", "load", [](RunConfig& r) -> Point& { return r.problem.load; });
        num("design", "theta", [](RunConfig& r) -> double& { return r.problem.theta; });
        num("design", "initial_density", [](RunConfig& r) -> double& { return r.problem.initial_density; });
        num("design", "stroke", [](RunConfig& r) -> double& { return r.problem.stroke; });
        t["clamp_load_to_domain"] = {"design", [](RunConfig& r, const Value& v, const Ctx& c) {
                                         r.problem.clamp_load_to_domain = as_bool(v, c);
                                     }};

        // bounds and move limits
        point("bounds", "support_min", [](RunConfig& r) -> Point& { return r.problem.bounds.support_min; });
        point("bounds", "support_max", [](RunConfig& r) -> Point& { return r.problem.bounds.support_max; });
        point("bounds", "load_min", [](RunConfig& r) -> Point& { return r.problem.bounds.load_min; });
        point("bounds", "load_max", [](RunConfig& r) -> Point& { return r.problem.bounds.load_max; });
        num("bounds", "theta_min", [](RunConfig& r) -> double& { return r.problem.bounds.theta_min; });
        num("bounds", "theta_max", [](RunConfig& r) -> double& { return r.problem.bounds.theta_max; });
        num("move", "move_rho", [](RunConfig& r) -> double& { return r.problem.move.rho; });
        num("move", "move_support", [](RunConfig& r) -> double& { return r.problem.move.support; });
        num("move", "move_load", [](RunConfig& r) -> double& { return r.problem.move.load; });
        num("move", "move_theta", [](RunConfig& r) -> double& { return r.problem.move.theta; });

        // outputs and goals
        t["output_points"] = {"outputs", [](RunConfig& r, const Value& v, const Ctx& c) {
                                  r.problem.outputs.clear();
                                  for (const auto& item : as_array(v, c)) {
                                      const auto& a = as_array(item, c);
                                      if (a.size() != 4) c.bad("each output is [x, y, \"ux\"|\"uy\", weight]");
                                      OutputSelector o;
                                      o.point = {as_number(a[0], c), as_number(a[1], c)};
                                      const std::string& comp = as_string(a[2], c);
                                      if (comp == "ux") o.component = 0;
                                      else if (comp == "uy") o.component = 1;
                                      else c.bad("component must be \"ux\" or \"uy\"");
                                      o.weight = as_number(a[3], c);
                                      r.problem.outputs.push_back(o);
                                  }
                              }};
        num("outputs", "k_out", [](RunConfig& r) -> double& { return r.problem.k_out; });
        point("outputs", "tracked_point", [](RunConfig& r) -> Point& { return r.problem.output_point; });
        t["objective"] = {"goals", [](RunConfig& r, const Value& v, const Ctx& c) {
                              const std::string s = trim(as_string(v, c));
                              const auto sp = s.find(' ');
                              const std::string dir = s.substr(0, sp);
                              if ((dir != "min" && dir != "max") || sp == std::string::npos)
                                  c.bad("expected \"min <quantity>\" or \"max <quantity>\"");
                              try {
                                  r.problem.objective = {parse_quantity(s.substr(sp + 1)), dir == "max"};
                              } catch (const ConfigValidationError& e) {
                                  c.bad(e.what());
                              }
                          }};
        t["constraints"] = {"goals", [](RunConfig& r, const Value& v, const Ctx& c) {
                                r.problem.constraints.clear();
                                for (const auto& item : as_array(v, c)) {
                                    try {
                                        for (auto& cs : parse_constraint(as_string(item, c)))
                                            r.problem.constraints.push_back(cs);
                                    } catch (const ConfigValidationError& e) {
                                        c.bad(e.what());
                                    }
                                }
                            }};
        t["load_cases"] = {"goals", [](RunConfig& r, const Value& v, const Ctx& c) {
                               r.problem.load_cases.clear();
                               for (const auto& p : as_points(v, c)) r.problem.load_cases.push_back(p);
                           }};
        t["precision_points"] = {"goals", [](RunConfig& r, const Value& v, const Ctx& c) {
                                     r.problem.precision_points.clear();
                                     for (const auto& item : as_array(v, c)) {
                                         const auto& a = as_array(item, c);
                                         if (a.size() != 3) c.bad("each precision point is [step, x, y]");
                                         r.problem.precision_points.push_back(
                                             {as_int(a[0], c), {as_number(a[1], c), as_number(a[2], c)}});
                                     }
                                 }};

        // optimizer
        integer("optimizer", "max_iterations", [](RunConfig& r) -> int& { return r.optimizer.max_iterations; });
        num("optimizer", "density_change_tol", [](RunConfig& r) -> double& { return r.optimizer.density_change_tol; });
        integer("optimizer", "oscillation_window",
                [](RunConfig& r) -> int& { return r.optimizer.oscillation_window; });
        integer("optimizer", "max_consecutive_failures",
                [](RunConfig& r) -> int& { return r.optimizer.max_consecutive_failures; });
        num("optimizer", "asyinit", [](RunConfig& r) -> double& { return r.optimizer.mma.asyinit; });
        num("optimizer", "asyincr", [](RunConfig& r) -> double& { return r.optimizer.mma.asyincr; });
        num("optimizer", "asydecr", [](RunConfig& r) -> double& { return r.optimizer.mma.asydecr; });
        return t;
    }();
    return table;
}

const std::vector<std::string>& section_names() {
    static const std::vector<std::string> names{"mesh",   "geometry", "material", "projection", "solver", "design",
                                                "bounds", "move",     "outputs",  "goals",      "optimizer"};
    return names;
}

void validate_run(const RunConfig& r) {
    r.problem.validate();
    if (r.problem.geometry.outline.empty() && r.problem.mesh_file.empty())
        throw ConfigValidationError("outline", "a custom problem needs [geometry] outline or [mesh] file");
    if (r.problem.mesh_file.empty() && !(r.problem.geometry.element_size > 0.0))
        throw ConfigValidationError("element_size", "must be positive");
    if (r.dump_every < 0) throw ConfigValidationError("dump_every", "must be non-negative");
    if (r.replay_steps < 1) throw ConfigValidationError("replay_steps", "must be positive");
    if (r.optimizer.max_iterations < 0) throw ConfigValidationError("max_iterations", "must be non-negative");
    if (!(r.optimizer.density_change_tol > 0.0))
        throw ConfigValidationError("density_change_tol", "must be positive");
    if (r.optimizer.max_consecutive_failures < 0)
        throw ConfigValidationError("max_consecutive_failures", "must be non-negative");
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
    const std::vector<Entry> entries = Parser(text).parse();
    const auto& table = key_table();

    // problem family first: its defaults are the base for every override
    RunConfig cfg;
    const Entry* problem = nullptr;
    std::map<std::string, const Entry*> seen;
    for (const auto& e : entries) {
        if (!e.section.empty() &&
            std::find(section_names().begin(), section_names().end(), e.section) == section_names().end()) {
            std::string best;
            std::size_t bd = 1000;
            for (const auto& s : section_names())
                if (auto d = edit_distance(e.section, s); d < bd) bd = d, best = s;
            throw ConfigValidationError(e.section, "unknown section [" + e.section + "]" + where(e) +
                                                       "; did you mean [" + best + "]?");
        }
        const auto it = table.find(e.key);
        if (it == table.end()) {
            std::string best;
            std::size_t bd = 1000;
            for (const auto& [k, def] : table)
                if (auto d = edit_distance(e.key, k); d < bd) bd = d, best = k;
            throw ConfigValidationError(e.key, "unknown key '" + e.key + "'" + where(e) + "; did you mean '" + best +
                                                   "'?");
        }
        if (!e.section.empty() && it->second.section != e.section)
            throw ConfigValidationError(e.key, "key '" + e.key + "' belongs to " +
                                                   (it->second.section.empty() ? std::string("the top level")
                                                                               : "[" + it->second.section + "]") +
                                                   where(e));
        if (seen.count(e.key)) throw ConfigValidationError(e.key, "duplicate key '" + e.key + "'" + where(e));
        seen[e.key] = &e;
        if (e.key == "problem") problem = &e;
    }
    if (!problem) throw ConfigValidationError("problem", "missing required key 'problem'");
    const Ctx pctx{problem, "problem"};
    const ProblemFamily family = parse_family(as_string(problem->value, pctx));
    if (family != ProblemFamily::custom) {
        cfg.problem = make_problem(family);
    } else {
        cfg.problem = ProblemSpec{};
        cfg.problem.name = "custom";
        cfg.problem.family = ProblemFamily::custom;
    }

    for (const auto& e : entries) table.at(e.key).set(cfg, e.value, Ctx{&e, e.key});

    if (!cfg.problem.mesh_file.empty() && !base_dir.empty() &&
        std::filesystem::path(cfg.problem.mesh_file).is_relative())
        cfg.problem.mesh_file = (std::filesystem::path(base_dir) / cfg.problem.mesh_file).lexically_normal().string();
    cfg.problem.fixed_bcs = cfg.mode == BcMode::fixed;
    validate_run(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open configuration file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

namespace {

std::string point_text(const Point& p) { return "[" + fmt(p.x()) + ", " + fmt(p.y()) + "]"; }

std::string points_text(const std::vector<Point>& pts, const std::string& indent) {
    if (pts.empty()) return "[]";
    std::string s = "[\n";
    for (const auto& p : pts) s += indent + "  " + point_text(p) + ",\n";
    return s + indent + "]";
}

}  // namespace

std::string dump_config(const RunConfig& r) {
    const ProblemSpec& p = r.problem;
    std::ostringstream os;
    os << "problem = " << quoted(to_string(p.family)) << "\n";
    os << "name = " << quoted(p.name) << "\n";
    os << "mode = " << quoted(to_string(r.mode)) << "\n";
    os << "output_dir = " << quoted(r.output_dir) << "\n";
    os << "trace_solver = " << (r.trace_solver ? "true" : "false") << "\n";
    os << "dump_every = " << r.dump_every << "\n";
    os << "replay_steps = " << r.replay_steps << "\n";

    os << "\n[mesh]\n";
    os << "element_size = " << fmt(p.geometry.element_size) << "\n";
    os << "thickness = " << fmt(p.thickness) << "\n";
    if (!p.mesh_file.empty()) os << "file = " << quoted(p.mesh_file) << "\n";

    os << "\n[geometry]\n";
    os << "outline = " << points_text(p.geometry.outline, "") << "\n";
    os << "holes = [";
    for (const auto& h : p.geometry.holes) os << "\n  " << points_text(h, "  ") << ",";
    os << (p.geometry.holes.empty() ? "]\n" : "\n]\n");
    os << "regions = [";
    for (const auto& reg : p.geometry.nondesign_regions)
        os << "\n  [" << quoted(reg.kind == RegionKind::solid ? "solid" : "void") << ", "
           << points_text(reg.polygon, "  ") << "],";
    os << (p.geometry.nondesign_regions.empty() ? "]\n" : "\n]\n");

    const auto& pr = p.projection;
    os << "\n[material]\n";
    os << "nu = " << fmt(p.nu) << "\n";
    os << "variant = " << quoted(p.variant == NeoHookeanVariant::printed ? "printed" : "consistent") << "\n";
    os << "E0 = " << fmt(pr.E0) << "\nE_min = " << fmt(pr.E_min) << "\np_simp = " << fmt(pr.p_simp) << "\n";
    os << "rho0 = " << fmt(pr.rho0) << "\nE_s = " << fmt(pr.E_s) << "\nnu_s = " << fmt(pr.nu_s) << "\n";
    os << "t_s = " << fmt(pr.t_s) << "\n";

    os << "\n[projection]\n";
    os << "b = " << fmt(pr.b) << "\nP = " << fmt(pr.P) << "\nQ = " << fmt(pr.Q) << "\n";
    os << "r = " << fmt(pr.r) << "\nr_min = " << fmt(pr.r_min) << "\nbeta = " << fmt(pr.beta) << "\n";

    os << "\n[solver]\n";
    os << "residual_tol = " << fmt(p.solver.tol_residual) << "\n";
    os << "max_corrector_iterations = " << p.solver.max_corrector_iters << "\n";
    os << "max_bisections = " << p.solver.max_bisections << "\n";
    os << "steps = " << p.solver.steps << "\n";

    os << "\n[design]\n";
    os << "supports = " << points_text(p.supports, "") << "\n";
    os << "support_fixed = [";
    for (size_t i = 0; i < p.support_fixed.size(); ++i) os << (i ? ", " : "") << (p.support_fixed[i] ? "true" : "false");
    os << "]\n";
    os << "load = " << point_text(p.load) << "\n";
    os << "theta = " << fmt(p.theta) << "\n";
    os << "initial_density = " << fmt(p.initial_density) << "\n";
    os << "stroke = " << fmt(p.stroke) << "\n";
    os << "clamp_load_to_domain = " << (p.clamp_load_to_domain ? "true" : "false") << "\n";

    os << "\n[bounds]\n";
    os << "support_min = " << point_text(p.bounds.support_min) << "\n";
    os << "support_max = " << point_text(p.bounds.support_max) << "\n";
    os << "load_min = " << point_text(p.bounds.load_min) << "\n";
    os << "load_max = " << point_text(p.bounds.load_max) << "\n";
    os << "theta_min = " << fmt(p.bounds.theta_min) << "\n";
    os << "theta_max = " << fmt(p.bounds.theta_max) << "\n";

    os << "\n[move]\n";
    os << "move_rho = " << fmt(p.move.rho) << "\nmove_support = " << fmt(p.move.support) << "\n";
    os << "move_load = " << fmt(p.move.load) << "\nmove_theta = " << fmt(p.move.theta) << "\n";

    os << "\n[outputs]\n";
    os << "output_points = [";
    for (const auto& o : p.outputs)
        os << "\n  [" << fmt(o.point.x()) << ", " << fmt(o.point.y()) << ", " << (o.component ? "\"uy\"" : "\"ux\"")
           << ", " << fmt(o.weight) << "],";
    os << (p.outputs.empty() ? "]\n" : "\n]\n");
    os << "k_out = " << fmt(p.k_out) << "\n";
    os << "tracked_point = " << point_text(p.output_point) << "\n";

    os << "\n[goals]\n";
    os << "objective = " << quoted((p.objective.maximize ? "max " : "min ") + quantity_text(p.objective.quantity))
       << "\n";
    os << "constraints = [";
    for (const auto& c : p.constraints) os << "\n  " << quoted(constraint_text(c)) << ",";
    os << (p.constraints.empty() ? "]\n" : "\n]\n");
    std::vector<Point> lcs(p.load_cases.begin(), p.load_cases.end());
    os << "load_cases = " << points_text(lcs, "") << "\n";
    os << "precision_points = [";
    for (const auto& pp : p.precision_points)
        os << "\n  [" << pp.step << ", " << fmt(pp.target.x()) << ", " << fmt(pp.target.y()) << "],";
    os << (p.precision_points.empty() ? "]\n" : "\n]\n");

    os << "\n[optimizer]\n";
    os << "max_iterations = " << r.optimizer.max_iterations << "\n";
    os << "density_change_tol = " << fmt(r.optimizer.density_change_tol) << "\n";
    os << "oscillation_window = " << r.optimizer.oscillation_window << "\n";
    os << "max_consecutive_failures = " << r.optimizer.max_consecutive_failures << "\n";
    os << "asyinit = " << fmt(r.optimizer.mma.asyinit) << "\n";
    os << "asyincr = " << fmt(r.optimizer.mma.asyincr) << "\n";
    os << "asydecr = " << fmt(r.optimizer.mma.asydecr) << "\n";
    return os.str();
}

}  // namespace varibc
