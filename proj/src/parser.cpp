#include "idealkit/parser.hpp"

#include <algorithm>
#include <cctype>
#include <memory>
#include <optional>

namespace idealkit {

namespace {

struct SExpr {
  // leaf when atom is set, list otherwise
  std::string atom;
  bool is_atom = false;
  std::vector<SExpr> items;
  int line = 0, col = 0;
};

class Reader {
public:
  explicit Reader(const std::string& text) : text_(text) {}

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  SExpr read() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError(line_, col_, "unexpected end of input");
    if (text_[pos_] == '(') return read_list();
    if (text_[pos_] == ')') throw ParseError(line_, col_, "unmatched ')'");
    return read_atom();
  }

private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr read_list() {
    SExpr list;
    list.line = line_;
    list.col = col_;
    advance();  // consume '('
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) throw ParseError(list.line, list.col, "unclosed '('");
      if (text_[pos_] == ')') {
        advance();
        return list;
      }
      list.items.push_back(read());
    }
  }

  SExpr read_atom() {
    SExpr atom;
    atom.is_atom = true;
    atom.line = line_;
    atom.col = col_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == ';')
        break;
      atom.atom += c;
      advance();
    }
    return atom;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

[[noreturn]] void fail(const SExpr& at, const std::string& path, const std::string& msg) {
  throw ParseError(at.line, at.col, msg + (path.empty() ? "" : " (at " + path + ")"));
}

const std::string& head(const SExpr& s, const std::string& path) {
  if (s.is_atom || s.items.empty() || !s.items[0].is_atom)
    fail(s, path, "expected a node form '(keyword ...)'");
  return s.items[0].atom;
}

Rat atom_rational(const SExpr& s, const std::string& path) {
  if (!s.is_atom) fail(s, path, "expected a rational");
  try {
    return parse_rational(s.atom);
  } catch (const Error& e) {
    fail(s, path, e.what());
  }
}

Nat atom_nat(const SExpr& s, const std::string& path) {
  if (!s.is_atom || s.atom.empty() ||
      s.atom.find_first_not_of("0123456789") != std::string::npos)
    fail(s, path, "expected a natural number");
  unsigned long long v = 0;
  try {
    v = std::stoull(s.atom);
  } catch (const std::exception&) {
    fail(s, path, "natural number out of range");
  }
  if (v > 0xffffffffull) fail(s, path, "natural number out of range");
  return static_cast<Nat>(v);
}

std::uint64_t atom_u64(const SExpr& s, const std::string& path) {
  if (!s.is_atom || s.atom.empty() ||
      s.atom.find_first_not_of("0123456789") != std::string::npos)
    fail(s, path, "expected a natural number");
  try {
    return std::stoull(s.atom);
  } catch (const std::exception&) {
    fail(s, path, "natural number out of range");
  }
}

GridPoint read_grid_point(const SExpr& s, const std::string& path) {
  if (s.is_atom || s.items.size() != 2)
    fail(s, path, "expected a grid point '(row col)'");
  return GridPoint{atom_nat(s.items[0], path), atom_nat(s.items[1], path)};
}

AnySet build_set(const SExpr& s, const std::string& path) {
  const std::string& kw = head(s, path);
  if (kw == "set") {
    std::vector<Nat> elems;
    for (std::size_t i = 1; i < s.items.size(); ++i)
      elems.push_back(atom_nat(s.items[i], path));
    return NatSet::from_unsorted(std::move(elems));
  }
  if (kw == "block") {
    if (s.items.size() != 3) fail(s, path, "block needs '(block lo hi)'");
    Nat lo = atom_nat(s.items[1], path), hi = atom_nat(s.items[2], path);
    if (lo > hi) fail(s, path, "block bounds out of order");
    return NatSet::interval(lo, hi);
  }
  if (kw == "grid") {
    std::vector<GridPoint> pts;
    for (std::size_t i = 1; i < s.items.size(); ++i)
      pts.push_back(read_grid_point(s.items[i], path));
    return GridSet::from_unsorted(std::move(pts));
  }
  fail(s, path, "expected a SET form: (set ...), (block lo hi) or (grid ...)");
}

ExprPtr build(const SExpr& s, Nat window, const std::string& path);

std::vector<ExprPtr> build_children(const SExpr& s, std::size_t from, Nat window,
                                    const std::string& path) {
  std::vector<ExprPtr> out;
  for (std::size_t i = from; i < s.items.size(); ++i)
    out.push_back(build(s.items[i], window,
                        path + "/child[" + std::to_string(i - from) + "]"));
  return out;
}

ExprPtr build(const SExpr& s, Nat window, const std::string& path) {
  const std::string& kw = head(s, path);
  try {
    if (kw == "measure") {
      if (s.items.size() != 2 || s.items[1].is_atom)
        fail(s, path, "measure needs '(measure ((pt w) ...))'");
      std::vector<Nat> nat_pts;
      std::vector<GridPoint> grid_pts;
      std::vector<Rat> weights;
      bool grid = false, nat = false;
      for (const SExpr& entry : s.items[1].items) {
        if (entry.is_atom || entry.items.size() != 2)
          fail(entry, path, "measure entry needs '(pt w)'");
        const SExpr& pt = entry.items[0];
        if (pt.is_atom) {
          nat = true;
          nat_pts.push_back(atom_nat(pt, path));
        } else {
          grid = true;
          grid_pts.push_back(read_grid_point(pt, path));
        }
        weights.push_back(atom_rational(entry.items[1], path));
      }
      if (nat && grid) fail(s, path, "measure mixes natural and grid points");
      // reorder weights to the sorted point order
      if (grid) {
        std::vector<std::size_t> idx(grid_pts.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
          return grid_pts[a] < grid_pts[b];
        });
        std::vector<GridPoint> pts;
        std::vector<Rat> ws;
        for (std::size_t i : idx) {
          pts.push_back(grid_pts[i]);
          ws.push_back(weights[i]);
        }
        return SubmeasureExpr::measure(GridSet(std::move(pts)), std::move(ws), window);
      }
      std::vector<std::pair<Nat, Rat>> entries;
      for (std::size_t i = 0; i < nat_pts.size(); ++i)
        entries.emplace_back(nat_pts[i], weights[i]);
      return SubmeasureExpr::measure_nat(std::move(entries), window);
    }
    if (kw == "capped" || kw == "ceilcount") {
      if (s.items.size() != 4)
        fail(s, path, kw + " needs '(" + kw + " a n SET)'");
      Rat unit = atom_rational(s.items[1], path);
      std::uint64_t n = atom_u64(s.items[2], path);
      AnySet block = build_set(s.items[3], path);
      return kw == "capped"
                 ? SubmeasureExpr::capped_count(std::move(unit), n, std::move(block), window)
                 : SubmeasureExpr::ceil_count(std::move(unit), n, std::move(block), window);
    }
    if (kw == "scale") {
      if (s.items.size() != 3) fail(s, path, "scale needs '(scale c E)'");
      return SubmeasureExpr::scale(atom_rational(s.items[1], path),
                                   build(s.items[2], window, path + "/child"));
    }
    if (kw == "sum") return SubmeasureExpr::sum(build_children(s, 1, window, path));
    if (kw == "sup") return SubmeasureExpr::sup(build_children(s, 1, window, path));
    if (kw == "topk") {
      if (s.items.size() < 3) fail(s, path, "topk needs '(topk k E ...)'");
      std::uint64_t k = atom_u64(s.items[1], path);
      return SubmeasureExpr::top_k_sum(static_cast<std::size_t>(k),
                                       build_children(s, 2, window, path));
    }
    if (kw == "qmix") {
      if (s.items.size() != 3 || s.items[2].is_atom)
        fail(s, path, "qmix needs '(qmix q ((a E) ...))'");
      Rat q = atom_rational(s.items[1], path);
      std::vector<Rat> weights;
      std::vector<ExprPtr> children;
      std::size_t i = 0;
      for (const SExpr& term : s.items[2].items) {
        if (term.is_atom || term.items.size() != 2)
          fail(term, path, "qmix term needs '(a E)'");
        std::string tp = path + "/term[" + std::to_string(i++) + "]";
        weights.push_back(atom_rational(term.items[0], tp));
        children.push_back(build(term.items[1], window, tp));
      }
      return SubmeasureExpr::q_mix(std::move(q), std::move(weights), std::move(children));
    }
    if (kw == "restrict") {
      if (s.items.size() != 3) fail(s, path, "restrict needs '(restrict E SET)'");
      return SubmeasureExpr::restrict(build(s.items[1], window, path + "/child"),
                                      build_set(s.items[2], path));
    }
    if (kw == "rowlift") {
      if (s.items.size() != 3) fail(s, path, "rowlift needs '(rowlift E row)'");
      return SubmeasureExpr::row_lift(build(s.items[1], window, path + "/child"),
                                      atom_nat(s.items[2], path));
    }
    if (kw == "hat") {
      if (s.items.size() != 2) fail(s, path, "hat needs '(hat E)'");
      return SubmeasureExpr::hat(build(s.items[1], window, path + "/child"), window);
    }
    if (kw == "step") {
      if (s.items.size() != 2 || s.items[1].is_atom)
        fail(s, path, "step needs '(step ((d lo hi) ...))'");
      std::vector<Rat> deltas;
      std::vector<Nat> uppers;
      for (const SExpr& st : s.items[1].items) {
        if (st.is_atom || st.items.size() != 3)
          fail(st, path, "step entry needs '(d lo hi)'");
        deltas.push_back(atom_rational(st.items[0], path));
        Nat lo = atom_nat(st.items[1], path);
        Nat expected = uppers.empty() ? 0 : uppers.back();
        if (lo != expected)
          fail(st, path, "step intervals must be consecutive from 0");
        uppers.push_back(atom_nat(st.items[2], path));
      }
      return SubmeasureExpr::step_interval(std::move(deltas), std::move(uppers), window);
    }
    if (kw == "erdos-ulam" || kw == "simple-density") {
      if (s.items.size() != 2 || s.items[1].is_atom)
        fail(s, path, kw + " needs '(" + kw + " (r0 r1 ...))'");
      std::vector<Rat> vals;
      for (const SExpr& v : s.items[1].items) vals.push_back(atom_rational(v, path));
      return kw == "erdos-ulam" ? SubmeasureExpr::erdos_ulam(std::move(vals), window)
                                : SubmeasureExpr::simple_density(std::move(vals), window);
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Window || e.kind() == ErrorKind::Resource ||
        e.kind() == ErrorKind::Overflow)
      throw;  // caps keep their kind so callers can report them as such
    fail(s, path.empty() ? kw : path, e.what());
  }
  fail(s, path, "unknown node keyword '" + kw + "'");
}

}  // namespace

ExprPtr parse_expr(const std::string& text, Nat window) {
  Reader reader(text);
  SExpr s = reader.read();
  if (!reader.at_end()) throw ParseError(s.line, s.col, "trailing input after expression");
  return build(s, window, "");
}

std::vector<ExprPtr> parse_exprs(const std::string& text, Nat window) {
  Reader reader(text);
  std::vector<ExprPtr> out;
  while (!reader.at_end()) out.push_back(build(reader.read(), window, ""));
  return out;
}

AnySet parse_set(const std::string& text) {
  Reader reader(text);
  SExpr s = reader.read();
  return build_set(s, "");
}

}  // namespace idealkit
