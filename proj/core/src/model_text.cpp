#include <cctype>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "madil/model.hpp"

namespace madil {

// --- naming ----------------------------------------------------------------

std::map<VarId, std::string> task_model_names(const TaskModel& M) {
  std::map<VarId, std::string> names;
  std::map<std::string, int> used;
  auto claim = [&](VarId v, const std::string& base) {
    int n = ++used[base];
    names[v] = n == 1 ? base : base + std::to_string(n);
  };
  std::function<void(const ModelNode&, const std::string&)> rec =
      [&](const ModelNode& m, const std::string& base) {
        claim(m.var, base);
        if (m.kind != ModelNode::Kind::Pattern) return;
        const auto& pnames = part_names(m.pat.id);
        for (size_t i = 0; i < m.parts.size(); ++i) rec(*m.parts[i], pnames[i]);
      };
  rec(*M.input, "x");
  rec(*M.output, "y");
  return names;
}

// --- printing ----------------------------------------------------------

namespace {

std::string pattern_label(const PatternInstance& p, const VarNamer& namer) {
  std::string s = pattern_name(p.id);
  if (p.lift > 0) s += "^" + std::to_string(p.lift);
  if (p.dep_param) s += "[" + to_string(*p.dep_param, namer) + "]";
  return s;
}

void print_model(const ModelNode& m, const VarNamer& namer, std::ostream& os) {
  switch (m.kind) {
    case ModelNode::Kind::Unknown:
      os << '?';
      return;
    case ModelNode::Kind::Expr:
      os << to_string(*m.expr, namer);
      return;
    case ModelNode::Kind::Pattern: {
      os << pattern_label(m.pat, namer) << '(';
      const auto& pnames = part_names(m.pat.id);
      for (size_t i = 0; i < m.parts.size(); ++i) {
        if (i) os << ", ";
        const ModelNode& p = *m.parts[i];
        if (p.kind == ModelNode::Kind::Unknown) {
          os << pnames[i] << ": ?";
        } else if (p.kind == ModelNode::Kind::Expr) {
          os << pnames[i] << " = " << to_string(*p.expr, namer);
        } else {
          print_model(p, namer, os);
        }
      }
      os << ')';
      return;
    }
  }
}

}  // namespace

std::string model_to_string(const ModelNode& m, const std::map<VarId, std::string>& names) {
  auto namer = [&names](VarId v) {
    auto it = names.find(v);
    return it != names.end() ? it->second : "x" + std::to_string(v);
  };
  std::ostringstream os;
  print_model(m, namer, os);
  return os.str();
}

std::string to_string(const TaskModel& M) {
  auto names = task_model_names(M);
  return model_to_string(*M.input, names) + "\n=>\n" + model_to_string(*M.output, names);
}

std::string to_string(const DescNode& d, const std::map<VarId, std::string>& names) {
  auto name = [&](VarId v) {
    auto it = names.find(v);
    return it != names.end() ? it->second : "x" + std::to_string(v);
  };
  std::ostringstream os;
  std::function<void(const DescNode&)> rec = [&](const DescNode& n) {
    os << name(n.var) << ": " << to_string(n.value);
    if (n.composite) {
      os << " = " << pattern_name(n.pat.id) << '(';
      for (size_t i = 0; i < n.parts.size(); ++i) {
        if (i) os << ", ";
        rec(*n.parts[i]);
      }
      os << ')';
    }
  };
  rec(d);
  return os.str();
}

// --- parsing -----------------------------------------------------------

namespace {

struct Lexer {
  std::string src;
  size_t pos = 0;

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c))
      throw std::runtime_error("model parse: expected '" + std::string(1, c) + "' at " +
                               std::to_string(pos));
  }
  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }
  bool peek2(char a, char b) {
    skip_ws();
    return pos + 1 < src.size() && src[pos] == a && src[pos + 1] == b;
  }
  std::string ident() {
    skip_ws();
    size_t s = pos;
    while (pos < src.size() &&
           (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
      ++pos;
    if (s == pos) throw std::runtime_error("model parse: identifier expected at " + std::to_string(pos));
    return src.substr(s, pos - s);
  }
  std::int64_t integer() {
    skip_ws();
    size_t s = pos;
    if (pos < src.size() && (src[pos] == '-' || src[pos] == '+')) ++pos;
    while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
    if (s == pos) throw std::runtime_error("model parse: integer expected at " + std::to_string(pos));
    return std::stoll(src.substr(s, pos - s));
  }
};

struct Parser {
  Lexer lx;
  std::map<std::string, VarId> vars;  // reference table (input definitions win)
  int next_var = 0;

  // Introducing a part or root: always a fresh variable. Output-side
  // definitions never shadow input names, so "bgcolor = bgcolor" binds a new
  // output part to the input's bgcolor.
  VarId var_define(const std::string& name) {
    VarId v = next_var++;
    if (!vars.count(name)) vars[name] = v;
    return v;
  }

  // Referencing a variable inside an expression.
  VarId var_for(const std::string& name) {
    auto it = vars.find(name);
    if (it != vars.end()) return it->second;
    VarId v = next_var++;
    vars[name] = v;
    return v;
  }

  // --- values ---

  Value parse_grid_literal(GridKind kind) {
    lx.expect('[');
    std::vector<std::vector<int>> rows;
    for (;;) {
      lx.expect('[');
      std::vector<int> row;
      if (lx.peek() != ']') {
        for (;;) {
          if (lx.peek() == '.') {
            lx.eat('.');
            row.push_back(kTransparent);
          } else {
            row.push_back(static_cast<int>(lx.integer()));
          }
          if (!lx.eat(',')) break;
        }
      }
      lx.expect(']');
      rows.push_back(std::move(row));
      if (!lx.eat(',')) break;
    }
    lx.expect(']');
    return Value(make_grid(kind, rows));
  }

  Value parse_motif_literal() {
    std::string name = lx.ident();
    // optional sharing-flag suffix, e.g. SymH_10
    bool si = false, sj = false;
    if (auto us = name.find('_'); us != std::string::npos && us + 2 < name.size() + 1) {
      std::string flags = name.substr(us + 1);
      if (flags.size() == 2 && (flags[0] == '0' || flags[0] == '1')) {
        si = flags[0] == '1';
        sj = flags[1] == '1';
        name = name.substr(0, us);
      }
    }
    for (int g = 0; g < 8; ++g) {
      auto grp = static_cast<Motif::SymGroup>(g);
      if (name == sym_group_name(grp)) return Value(Motif::symmetry(grp, si, sj));
    }
    auto size_suffix = [&]() {
      lx.expect('(');
      int h = static_cast<int>(lx.integer());
      lx.expect('x');
      int w = static_cast<int>(lx.integer());
      lx.expect(')');
      return std::make_pair(h, w);
    };
    if (name == "Periodic") {
      auto [h, w] = size_suffix();
      return Value(Motif::periodic(h, w));
    }
    for (auto s : {Motif::Shape::Rectangle, Motif::Shape::Cross, Motif::Shape::Border}) {
      if (name == shape_name(s)) {
        auto [h, w] = size_suffix();
        return Value(Motif::templ(s, h, w));
      }
    }
    throw std::runtime_error("model parse: unknown motif " + name);
  }

  Value parse_value(const DistClass& cls) {
    char c = lx.peek();
    if (cls.depth > 0) {
      // sequence literal
      lx.expect('[');
      std::vector<Value> items;
      if (lx.peek() != ']') {
        for (;;) {
          items.push_back(parse_value(cls.item()));
          if (!lx.eat(',')) break;
        }
      }
      lx.expect(']');
      return seq_v(cls.depth, std::move(items));
    }
    switch (cls.tag) {
      case Tag::Int:
        return int_v(lx.integer());
      case Tag::Color: {
        if (c == 'c') {
          lx.eat('c');
          return color_v(static_cast<std::uint8_t>(lx.integer()));
        }
        return color_v(static_cast<std::uint8_t>(lx.integer()));
      }
      case Tag::Motif:
        return parse_motif_literal();
      case Tag::Vec: {
        lx.expect('(');
        std::int64_t i = lx.integer();
        lx.expect(',');
        std::int64_t j = lx.integer();
        lx.expect(')');
        return vec_v(i, j);
      }
      case Tag::Grid:
        return parse_grid_literal(cls.kind);
      default:
        throw std::runtime_error("model parse: unsupported constant class " + cls.str());
    }
  }

  // --- expressions ---

  FunctionId fn_by_name(const std::string& name) {
    for (const FunctionId& f : arc_functions())
      if (fn_name(f) == name) return f;  // static arg patched below
    throw std::runtime_error("model parse: unknown function " + name);
  }

  ExprPtr parse_expr(const DistClass& cls) {
    char c = lx.peek();
    // color literals (cN) take precedence over identifiers in color slots
    if (cls.tag == Tag::Color && cls.depth == 0 && c == 'c' && lx.pos + 1 < lx.src.size() &&
        std::isdigit(static_cast<unsigned char>(lx.src[lx.pos + 1])))
      return Expression::constant(parse_value(cls));
    // likewise for motif literals, which start with an uppercase letter
    if (cls.tag == Tag::Motif && cls.depth == 0 &&
        std::isupper(static_cast<unsigned char>(c)))
      return Expression::constant(parse_value(cls));
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string name = lx.ident();
      if (lx.peek() == '(' && !vars.count(name)) {
        FunctionId f = fn_by_name(name);
        lx.expect('(');
        // argument classes are not tracked; constants below are class-free
        ExprPtr arg = parse_expr(DistClass::scalar(Tag::Int));
        if (static_count(f.fn) > 0) {
          lx.expect(',');
          lx.skip_ws();
          if (std::isalpha(static_cast<unsigned char>(lx.peek())) && lx.peek() != 'c') {
            std::string sym = lx.ident();
            static const char* names[] = {"Id", "FlipH", "FlipV", "Rot90",
                                          "Rot180", "Rot270", "Transpose", "AntiTranspose"};
            for (int s = 0; s < kNumSymTransforms; ++s)
              if (sym == names[s]) f.k = s;
          } else if (lx.peek() == 'c') {
            lx.eat('c');
            f.k = static_cast<int>(lx.integer());
          } else {
            f.k = static_cast<int>(lx.integer());
          }
        }
        lx.expect(')');
        return Expression::app(f, {arg});
      }
      return Expression::var(var_for(name));
    }
    return Expression::constant(parse_value(cls));
  }

  // --- models ---

  PatternName pattern_by_name(const std::string& base) {
    static const std::pair<const char*, PatternName> table[] = {
        {"BgColor", PatternName::BgColor}, {"Monocolor", PatternName::Monocolor},
        {"Motif", PatternName::MotifP}, {"IsFull", PatternName::IsFull},
        {"Empty", PatternName::Empty}, {"Full", PatternName::Full},
        {"Point", PatternName::Point}, {"Segment", PatternName::Segment},
        {"Vec", PatternName::Vec}, {"Square", PatternName::Square},
        {"Swap", PatternName::Swap}, {"Replace", PatternName::Replace},
        {"Objects", PatternName::Objects}, {"Metagrid", PatternName::Metagrid},
        {"ColorRow", PatternName::ColorRow}, {"ColorCol", PatternName::ColorCol},
        {"ColorMat", PatternName::ColorMat}, {"AsGrid", PatternName::AsGrid},
        {"Range", PatternName::Range}, {"Obj", PatternName::ObjP},
        {"Crop", PatternName::Crop}, {"Recoloring", PatternName::Recoloring},
        {"Index", PatternName::Index}};
    for (auto& [n, p] : table)
      if (base == n) return p;
    throw std::runtime_error("model parse: unknown pattern " + base);
  }

  ModelPtr parse_model(const std::string& root_name, const DistClass& cls) {
    if (lx.peek() == '?') {
      lx.eat('?');
      return ModelNode::unknown(var_define(root_name));
    }
    // pattern node or bare expression
    size_t save = lx.pos;
    if (std::isupper(static_cast<unsigned char>(lx.peek()))) {
      std::string label = lx.ident();
      PatternInstance inst;
      std::string base = label;
      // Cons_d / Repeat_d / DomainMap_colors suffixes
      if (auto us = base.find('_'); us != std::string::npos) {
        std::string head = base.substr(0, us), tail = base.substr(us + 1);
        if (head == "Cons" || head == "Repeat") {
          inst.id.d = std::stoi(tail);
          base = head;
          inst.id.name = head == "Cons" ? PatternName::Cons : PatternName::Repeat;
        } else if (head == "DomainMap") {
          for (char ch : tail) inst.id.color_set.push_back(static_cast<std::uint8_t>(ch - '0'));
          base = head;
          inst.id.name = PatternName::DomainMap;
        } else {
          base.clear();
        }
      } else {
        inst.id.name = pattern_by_name(base);
      }
      if (base.empty()) {
        lx.pos = save;  // not a pattern label; re-parse as expression
      } else {
        if (lx.eat('^')) inst.lift = static_cast<int>(lx.integer());
        if (lx.eat('[')) {
          std::string pv = lx.ident();
          inst.dep_param = Expression::var(var_for(pv));
          lx.expect(']');
          if (inst.id.name == PatternName::Index) inst.id.d = 1;  // refined by class below
        }
        DistClass inner = cls;
        for (int k = 0; k < inst.lift; ++k) inner = inner.item();
        if (inner.tag == Tag::Grid) inst.id.kind = inner.kind;
        lx.expect('(');
        std::vector<ModelPtr> parts;
        const auto& pnames = part_names(inst.id);
        for (int i = 0; i < arity(inst.id); ++i) {
          if (i) lx.expect(',');
          DistClass pc = part_class(inst.id, i, cls, inst.lift);
          // named part ("name: model" / "name = expr") or bare pattern node
          size_t mark = lx.pos;
          std::string pname = pnames[i];
          if (std::isalpha(static_cast<unsigned char>(lx.peek()))) {
            std::string id = lx.ident();
            if (lx.peek() == ':') {
              lx.eat(':');
              parts.push_back(parse_model(id, pc));
              continue;
            }
            if (lx.peek() == '=') {
              lx.eat('=');
              VarId v = var_define(id);
              parts.push_back(ModelNode::expression(v, parse_expr(pc)));
              continue;
            }
            lx.pos = mark;
          }
          parts.push_back(parse_model(pname + "_anon" + std::to_string(lx.pos), pc));
        }
        lx.expect(')');
        return ModelNode::pattern(var_define(root_name + "@" + std::to_string(save)), std::move(inst),
                                  std::move(parts));
      }
    }
    return ModelNode::expression(var_define(root_name), parse_expr(cls));
  }
};

}  // namespace

TaskModel parse_task_model(const std::string& text) {
  auto sep = text.find("=>");
  if (sep == std::string::npos) throw std::runtime_error("model parse: missing '=>' separator");
  Parser p;
  p.lx.src = text.substr(0, sep);
  TaskModel M;
  M.input = p.parse_model("x", input_root_dist().klass());
  p.lx = Lexer{text.substr(sep + 2), 0};
  M.output = p.parse_model("y", output_root_dist().klass());
  M.next_var = p.next_var;
  if (!well_formed(M)) throw std::runtime_error("model parse: ill-formed task model");
  return M;
}

}  // namespace madil
