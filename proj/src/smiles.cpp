#include "ivafuse/smiles.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <utility>

namespace ivafuse {

double bond_order_value(BondOrder order) {
  switch (order) {
    case BondOrder::Single: return 1.0;
    case BondOrder::Aromatic: return 1.5;
    case BondOrder::Double: return 2.0;
    case BondOrder::Triple: return 3.0;
  }
  return 0.0;
}

char bond_symbol(BondOrder order) {
  switch (order) {
    case BondOrder::Single: return '-';
    case BondOrder::Aromatic: return ':';
    case BondOrder::Double: return '=';
    case BondOrder::Triple: return '#';
  }
  return '?';
}

namespace {

struct ElementInfo {
  std::string_view symbol;
  std::array<int, 3> valences;  // ascending, 0 = unused
  bool organic;                 // allowed outside brackets
  bool aromatic_ok;             // may be written lowercase
};

constexpr std::array<ElementInfo, 17> kElements{{
    {"H", {1, 0, 0}, false, false},
    {"Li", {1, 0, 0}, false, false},
    {"B", {3, 0, 0}, true, true},
    {"C", {4, 0, 0}, true, true},
    {"N", {3, 0, 0}, true, true},
    {"O", {2, 0, 0}, true, true},
    {"F", {1, 0, 0}, true, false},
    {"Na", {1, 0, 0}, false, false},
    {"Si", {4, 0, 0}, false, false},
    {"P", {3, 5, 0}, true, true},
    {"S", {2, 4, 6}, true, true},
    {"Cl", {1, 0, 0}, true, false},
    {"K", {1, 0, 0}, false, false},
    {"Se", {2, 4, 6}, false, true},
    {"Br", {1, 0, 0}, true, false},
    {"I", {1, 0, 0}, true, false},
    {"As", {3, 5, 0}, false, true},
}};

const ElementInfo* find_element(std::string_view sym) {
  for (const auto& e : kElements) {
    if (e.symbol == sym) return &e;
  }
  return nullptr;
}

// Valences after the charge shift applied to N and O.
std::vector<int> allowed_valences(const GraphAtom& a) {
  const ElementInfo* info = find_element(a.element);
  std::vector<int> out;
  const int shift = (a.element == "N" || a.element == "O") ? a.charge : 0;
  for (int v : info->valences) {
    if (v > 0 && v + shift >= 0) out.push_back(v + shift);
  }
  return out;
}

// Kekule-equivalent integer sum: aromatic bonds count as single, plus one
// double-bond contribution unless that exceeds the lowest valence.
int kekule_sum(int other, int n_aromatic, const std::vector<int>& valences) {
  int sum = other + n_aromatic;
  if (n_aromatic > 0 && !valences.empty() && sum + 1 <= valences.front()) sum += 1;
  return sum;
}

struct AtomSums {
  int other = 0;       // integer orders of non-aromatic bonds
  int n_aromatic = 0;  // number of aromatic bonds
};

std::vector<AtomSums> atom_sums(const MoleculeGraph& g) {
  std::vector<AtomSums> out(g.atoms.size());
  for (const auto& b : g.bonds) {
    for (int end : {b.i, b.j}) {
      if (b.order == BondOrder::Aromatic) {
        ++out[end].n_aromatic;
      } else {
        out[end].other += static_cast<int>(bond_order_value(b.order));
      }
    }
  }
  return out;
}

class Parser {
 public:
  Parser(std::string_view s, std::string id) : s_(s) { g_.id = std::move(id); }

  MoleculeGraph run() {
    if (s_.empty()) fail("empty SMILES", 0);
    while (pos_ < s_.size()) step();
    if (pending_) fail("dangling bond symbol", pending_offset_);
    if (!branches_.empty()) fail("unmatched '('", branches_.back().offset);
    if (!rings_.empty()) {
      std::size_t first = s_.size();
      for (const auto& [num, ring] : rings_) first = std::min(first, ring.offset);
      fail("unclosed ring bond", first);
    }
    if (g_.atoms.empty()) fail("no atoms", 0);
    materialize_hydrogens();
    return std::move(g_);
  }

 private:
  struct OpenRing {
    int atom;
    std::optional<BondOrder> order;
    std::size_t offset;
  };
  struct Branch {
    int atom;
    std::size_t offset;
  };

  [[noreturn]] void fail(const std::string& what, std::size_t offset) const {
    throw ParseError("SMILES \"" + std::string(s_) + "\": " + what + " at offset " + std::to_string(offset),
                     0, 0, offset);
  }

  char peek(std::size_t ahead = 0) const { return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0'; }

  void step() {
    const char c = peek();
    const std::size_t at = pos_;
    switch (c) {
      case '-': case '=': case '#': case ':': case '/': case '\\': {
        if (pending_) fail("two consecutive bond symbols", at);
        if (prev_ < 0) fail("bond symbol without preceding atom", at);
        pending_ = c == '=' ? BondOrder::Double
                 : c == '#' ? BondOrder::Triple
                 : c == ':' ? BondOrder::Aromatic
                            : BondOrder::Single;
        pending_offset_ = at;
        ++pos_;
        return;
      }
      case '(':
        if (prev_ < 0) fail("branch without preceding atom", at);
        if (pending_) fail("bond symbol before '('", pending_offset_);
        branches_.push_back({prev_, at});
        ++pos_;
        return;
      case ')':
        if (branches_.empty()) fail("unmatched ')'", at);
        if (pending_) fail("dangling bond symbol", pending_offset_);
        prev_ = branches_.back().atom;
        branches_.pop_back();
        ++pos_;
        return;
      case '.':
        if (pending_) fail("bond symbol before '.'", pending_offset_);
        prev_ = -1;
        ++pos_;
        return;
      case '%': {
        if (!std::isdigit(static_cast<unsigned char>(peek(1))) ||
            !std::isdigit(static_cast<unsigned char>(peek(2)))) {
          fail("'%' must be followed by two digits", at);
        }
        const int num = (peek(1) - '0') * 10 + (peek(2) - '0');
        pos_ += 3;
        ring_bond(num, at);
        return;
      }
      default:
        break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      ++pos_;
      ring_bond(c - '0', at);
      return;
    }
    if (c == '[') {
      add_atom(bracket_atom(), at);
      return;
    }
    add_atom(organic_atom(), at);
  }

  GraphAtom organic_atom() {
    const std::size_t at = pos_;
    GraphAtom a;
    const char c = peek();
    if (c == 'C' && peek(1) == 'l') {
      a.element = "Cl";
      pos_ += 2;
    } else if (c == 'B' && peek(1) == 'r') {
      a.element = "Br";
      pos_ += 2;
    } else if (std::isalpha(static_cast<unsigned char>(c))) {
      const bool lower = std::islower(static_cast<unsigned char>(c));
      a.element = std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
      const ElementInfo* info = find_element(a.element);
      if (!info || !info->organic || (lower && !info->aromatic_ok)) {
        fail(std::string("unknown symbol '") + c + "'", at);
      }
      a.aromatic = lower;
      ++pos_;
    } else {
      fail(std::string("unknown symbol '") + c + "'", at);
    }
    return a;
  }

  GraphAtom bracket_atom() {
    const std::size_t open = pos_;
    ++pos_;  // '['
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;  // isotope

    GraphAtom a;
    const std::size_t sym_at = pos_;
    const char c = peek();
    if (!std::isalpha(static_cast<unsigned char>(c))) fail("expected element symbol in bracket atom", sym_at);
    if (std::islower(static_cast<unsigned char>(c))) {
      a.aromatic = true;
      std::string two{static_cast<char>(std::toupper(static_cast<unsigned char>(c))), peek(1)};
      std::string one(1, static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
      if (std::islower(static_cast<unsigned char>(peek(1))) && find_element(two) && find_element(two)->aromatic_ok) {
        a.element = two;
        pos_ += 2;
      } else {
        a.element = one;
        ++pos_;
      }
      const ElementInfo* info = find_element(a.element);
      if (!info || !info->aromatic_ok) fail("unknown aromatic symbol", sym_at);
    } else {
      std::string two{c, peek(1)};
      if (std::islower(static_cast<unsigned char>(peek(1))) && find_element(two)) {
        a.element = two;
        pos_ += 2;
      } else {
        a.element = std::string(1, c);
        ++pos_;
      }
      if (!find_element(a.element)) fail("unknown element symbol", sym_at);
    }

    // Chirality: @, @@, @TH1, @SP2, @OH12, ...
    if (peek() == '@') {
      ++pos_;
      if (peek() == '@') {
        ++pos_;
      } else {
        static constexpr std::array<std::string_view, 5> kClasses{"TH", "AL", "SP", "TB", "OH"};
        for (auto cls : kClasses) {
          if (s_.substr(pos_, 2) == cls) {
            pos_ += 2;
            while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
            break;
          }
        }
      }
    }

    int h = 0;
    if (peek() == 'H') {
      ++pos_;
      h = 1;
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        h = peek() - '0';
        ++pos_;
      }
    }
    a.explicit_h = h;

    if (peek() == '+' || peek() == '-') {
      const char sign = peek();
      ++pos_;
      int mag = 1;
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        mag = 0;
        while (std::isdigit(static_cast<unsigned char>(peek()))) mag = mag * 10 + (s_[pos_++] - '0');
      } else {
        while (peek() == sign) {
          ++mag;
          ++pos_;
        }
      }
      a.charge = sign == '+' ? mag : -mag;
    }

    if (peek() == ':') {
      ++pos_;
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("atom class needs digits", pos_);
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    }
    if (peek() != ']') fail("unterminated bracket atom", open);
    ++pos_;
    return a;
  }

  void add_bond(int i, int j, BondOrder order, std::size_t at) {
    if (i == j) fail("bond from atom to itself", at);
    for (const auto& b : g_.bonds) {
      if ((b.i == i && b.j == j) || (b.i == j && b.j == i)) fail("duplicate bond", at);
    }
    if (order == BondOrder::Aromatic && !(g_.atoms[i].aromatic && g_.atoms[j].aromatic)) {
      fail("aromatic bond between non-aromatic atoms", at);
    }
    g_.bonds.push_back({i, j, order});
  }

  BondOrder default_order(int i, int j) const {
    return g_.atoms[i].aromatic && g_.atoms[j].aromatic ? BondOrder::Aromatic : BondOrder::Single;
  }

  void add_atom(GraphAtom a, std::size_t at) {
    const int idx = static_cast<int>(g_.atoms.size());
    g_.atoms.push_back(std::move(a));
    offsets_.push_back(at);
    if (prev_ >= 0) {
      const BondOrder order = pending_ ? *pending_ : default_order(prev_, idx);
      add_bond(prev_, idx, order, pending_ ? pending_offset_ : at);
    } else if (pending_) {
      fail("bond symbol without preceding atom", pending_offset_);
    }
    pending_.reset();
    prev_ = idx;
  }

  void ring_bond(int num, std::size_t at) {
    if (prev_ < 0) fail("ring bond without preceding atom", at);
    auto it = rings_.find(num);
    if (it == rings_.end()) {
      rings_.emplace(num, OpenRing{prev_, pending_, at});
      pending_.reset();
      return;
    }
    const OpenRing open = it->second;
    rings_.erase(it);
    if (open.order && pending_ && *open.order != *pending_) fail("conflicting ring bond symbols", at);
    const BondOrder order = pending_ ? *pending_ : open.order ? *open.order : default_order(open.atom, prev_);
    add_bond(open.atom, prev_, order, at);
    pending_.reset();
  }

  void materialize_hydrogens() {
    const auto sums = atom_sums(g_);
    const int heavy = static_cast<int>(g_.atoms.size());
    std::vector<int> hcount(heavy, 0);
    for (int i = 0; i < heavy; ++i) {
      GraphAtom& a = g_.atoms[i];
      const auto valences = allowed_valences(a);
      if (valences.empty()) fail("impossible charge for " + a.element, offsets_[i]);
      const int explicit_h = a.explicit_h.value_or(0);
      const int sum = kekule_sum(sums[i].other + explicit_h, sums[i].n_aromatic, valences);
      const auto fit = std::find_if(valences.begin(), valences.end(), [&](int v) { return v >= sum; });
      if (fit == valences.end()) {
        fail("valence overflow on " + a.element + " (bond-order sum " + std::to_string(sum) + ")", offsets_[i]);
      }
      if (a.explicit_h) {
        hcount[i] = explicit_h;
        a.valence = sum;
      } else {
        hcount[i] = *fit - sum;
        a.valence = *fit;
      }
      a.hydrogens_added = hcount[i];
    }
    for (int i = 0; i < heavy; ++i) {
      for (int h = 0; h < hcount[i]; ++h) {
        GraphAtom hyd;
        hyd.element = "H";
        hyd.valence = 1;
        g_.atoms.push_back(hyd);
        g_.bonds.push_back({i, static_cast<int>(g_.atoms.size()) - 1, BondOrder::Single});
      }
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  MoleculeGraph g_;
  std::vector<std::size_t> offsets_;
  int prev_ = -1;
  std::optional<BondOrder> pending_;
  std::size_t pending_offset_ = 0;
  std::vector<Branch> branches_;
  std::map<int, OpenRing> rings_;
};

}  // namespace

MoleculeGraph parse_smiles(std::string_view smiles, std::string id) {
  return Parser(smiles, std::move(id)).run();
}

int heavy_atom_count(const MoleculeGraph& g) {
  return static_cast<int>(std::count_if(g.atoms.begin(), g.atoms.end(),
                                        [](const GraphAtom& a) { return a.element != "H"; }));
}

double bond_order_sum(const MoleculeGraph& g, int atom) {
  double sum = 0.0;
  for (const auto& b : g.bonds) {
    if (b.i == atom || b.j == atom) sum += bond_order_value(b.order);
  }
  return sum;
}

int valence_sum(const MoleculeGraph& g, int atom) {
  AtomSums s;
  for (const auto& b : g.bonds) {
    if (b.i != atom && b.j != atom) continue;
    if (b.order == BondOrder::Aromatic) {
      ++s.n_aromatic;
    } else {
      s.other += static_cast<int>(bond_order_value(b.order));
    }
  }
  return kekule_sum(s.other, s.n_aromatic, allowed_valences(g.atoms[atom]));
}

}  // namespace ivafuse
