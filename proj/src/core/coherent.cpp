#include "core/coherent.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <compare>
#include <map>
#include <sstream>

namespace permsim {

namespace {

// Stable-refinement engine over position colors. Signatures are built from
// invariant data only (current colors and path counts), and new color ids
// are ranks of the sorted distinct signatures, so the numbering is
// canonical: relabeling vertices of the input permutes positions but not
// color ids.
struct Refinement {
  int n;
  std::vector<int> color;  // per position i*n+j
  int count = 0;
  int rounds = 0;
};

Refinement refine_to_stable(int n, const std::vector<std::vector<int64_t>>& seed) {
  Refinement r;
  r.n = n;
  r.color.assign(static_cast<size_t>(n) * n, 0);
  {
    std::map<std::vector<int64_t>, int> ranks;
    for (const auto& s : seed) ranks.emplace(s, 0);
    int next = 0;
    for (auto& kv : ranks) kv.second = next++;
    for (size_t p = 0; p < r.color.size(); ++p) r.color[p] = ranks[seed[p]];
    r.count = next;
  }

  const int max_rounds = n * n + 1;
  while (true) {
    ++r.rounds;
    if (r.rounds > max_rounds)
      throw InternalError("coherent refinement failed to stabilize in n^2 rounds");
    std::map<std::vector<int64_t>, int> ranks;
    std::vector<std::vector<int64_t>> sig(static_cast<size_t>(n) * n);
    std::map<std::pair<int, int>, int64_t> counts;
    for (int u = 0; u < n; ++u) {
      for (int v = 0; v < n; ++v) {
        counts.clear();
        for (int w = 0; w < n; ++w)
          ++counts[{r.color[static_cast<size_t>(u) * n + w],
                    r.color[static_cast<size_t>(w) * n + v]}];
        auto& s = sig[static_cast<size_t>(u) * n + v];
        s.reserve(2 + 3 * counts.size());
        s.push_back(r.color[static_cast<size_t>(u) * n + v]);
        s.push_back(r.color[static_cast<size_t>(v) * n + u]);
        for (const auto& [key, cnt] : counts) {
          s.push_back(key.first);
          s.push_back(key.second);
          s.push_back(cnt);
        }
        ranks.emplace(s, 0);
      }
    }
    int next = 0;
    for (auto& kv : ranks) kv.second = next++;
    if (next == r.count) break;  // refinement only splits, so equal count
                                 // means an unchanged partition
    for (size_t p = 0; p < r.color.size(); ++p)
      r.color[p] = ranks[sig[p]];
    r.count = next;
  }
  return r;
}

CanonicalBasis basis_from_colors(int n, const std::vector<int>& color, int count) {
  // order classes diagonal-first, preserving canonical color order
  std::vector<char> has_diag(count, 0), has_off(count, 0);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      (u == v ? has_diag : has_off)[color[static_cast<size_t>(u) * n + v]] = 1;
  for (int ci = 0; ci < count; ++ci)
    if (has_diag[ci] && has_off[ci])
      throw InternalError("class mixes diagonal and off-diagonal positions");

  std::vector<int> order(count, -1);
  int next = 0;
  for (int ci = 0; ci < count; ++ci)
    if (has_diag[ci]) order[ci] = next++;
  for (int ci = 0; ci < count; ++ci)
    if (!has_diag[ci]) order[ci] = next++;

  CanonicalBasis basis;
  basis.n = n;
  basis.elements.resize(count);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      int e = order[color[static_cast<size_t>(u) * n + v]];
      basis.elements[e].support.emplace_back(u, v);
    }

  for (int e = 0; e < count; ++e) {
    auto& el = basis.elements[e];
    el.diagonal = el.support.front().first == el.support.front().second;
    // transpose partner
    auto [u0, v0] = el.support.front();
    int partner = order[color[static_cast<size_t>(v0) * n + u0]];
    for (auto [u, v] : el.support)
      if (order[color[static_cast<size_t>(v) * n + u]] != partner)
        throw InternalError("basis is not transpose-closed");
    el.transpose_partner = partner;
    el.symmetric = (partner == e);
    // balancedness
    std::vector<int64_t> row_cnt(n, 0), col_cnt(n, 0);
    for (auto [u, v] : el.support) {
      ++row_cnt[u];
      ++col_cnt[v];
    }
    int64_t r = 0, c = 0;
    for (int u = 0; u < n; ++u) {
      if (row_cnt[u]) {
        if (r && row_cnt[u] != r)
          throw InternalError("basis element has unbalanced rows");
        r = row_cnt[u];
      }
      if (col_cnt[u]) {
        if (c && col_cnt[u] != c)
          throw InternalError("basis element has unbalanced columns");
        c = col_cnt[u];
      }
    }
    el.row_degree = r;
    el.col_degree = c;
  }
  return basis;
}

std::vector<std::vector<int64_t>> seed_from_values(
    int n, const std::vector<std::vector<int64_t>>& value_codes) {
  std::vector<std::vector<int64_t>> seed(static_cast<size_t>(n) * n);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      auto& s = seed[static_cast<size_t>(u) * n + v];
      s.reserve(1 + value_codes.size());
      s.push_back(u == v ? 1 : 0);
      for (const auto& codes : value_codes)
        s.push_back(codes[static_cast<size_t>(u) * n + v]);
    }
  return seed;
}

}  // namespace

std::vector<int> CanonicalBasis::position_class() const {
  std::vector<int> cls(static_cast<size_t>(n) * n, -1);
  for (int e = 0; e < dim(); ++e)
    for (auto [u, v] : elements[e].support)
      cls[static_cast<size_t>(u) * n + v] = e;
  return cls;
}

int64_t StructureTensor::at(int i, int j, int k) const {
  const auto& s = slice(i, j);
  auto it = std::lower_bound(s.begin(), s.end(), k,
                             [](const auto& p, int key) { return p.first < key; });
  if (it != s.end() && it->first == k) return it->second;
  return 0;
}

CanonicalBasis coherent_closure(const std::vector<AdjacencyMatrix>& mats) {
  if (mats.empty()) throw std::invalid_argument("need at least one matrix");
  int n = mats[0].n;
  for (const auto& m : mats)
    if (m.n != n) throw std::invalid_argument("matrices must share one order");
  std::vector<std::vector<int64_t>> codes;
  codes.reserve(mats.size());
  for (const auto& m : mats) codes.push_back(m.entries);
  auto ref = refine_to_stable(n, seed_from_values(n, codes));
  auto basis = basis_from_colors(n, ref.color, ref.count);
  check_basis_invariants(basis);
  return basis;
}

CanonicalBasis coherent_closure_real(const std::vector<std::vector<double>>& mats,
                                     int n) {
  if (mats.empty()) throw std::invalid_argument("need at least one matrix");
  std::vector<std::vector<int64_t>> codes;
  for (const auto& m : mats) {
    if (m.size() != static_cast<size_t>(n) * n)
      throw std::invalid_argument("matrices must share one order");
    // merge values closer than 1e-12 relative into one level
    std::vector<double> sorted(m);
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> levels;
    for (double v : sorted) {
      if (levels.empty() ||
          v - levels.back() >
              1e-12 * std::max({1.0, std::abs(v), std::abs(levels.back())}))
        levels.push_back(v);
    }
    std::vector<int64_t> c(m.size());
    for (size_t p = 0; p < m.size(); ++p) {
      auto it = std::upper_bound(levels.begin(), levels.end(), m[p]);
      c[p] = static_cast<int64_t>(it - levels.begin()) - 1;
    }
    codes.push_back(std::move(c));
  }
  auto ref = refine_to_stable(n, seed_from_values(n, codes));
  auto basis = basis_from_colors(n, ref.color, ref.count);
  check_basis_invariants(basis);
  return basis;
}

void check_basis_invariants(const CanonicalBasis& basis) {
  int n = basis.n;
  size_t total = 0;
  std::vector<int> cover(static_cast<size_t>(n) * n, 0);
  for (const auto& el : basis.elements) {
    total += el.support.size();
    for (auto [u, v] : el.support) {
      if (u < 0 || u >= n || v < 0 || v >= n)
        throw InternalError("support position out of range");
      ++cover[static_cast<size_t>(u) * n + v];
      if (el.diagonal != (u == v))
        throw InternalError("diagonal flag contradicts the support");
    }
  }
  if (total != static_cast<size_t>(n) * n)
    throw InternalError("supports do not cover the n x n grid");
  for (int c : cover)
    if (c != 1) throw InternalError("supports are not pairwise disjoint");

  auto cls = basis.position_class();
  for (int e = 0; e < basis.dim(); ++e) {
    const auto& el = basis.elements[e];
    int tp = el.transpose_partner;
    if (tp < 0 || tp >= basis.dim())
      throw InternalError("missing transpose partner");
    if (basis.elements[tp].transpose_partner != e)
      throw InternalError("transpose pairing is not an involution");
    if (el.symmetric != (tp == e))
      throw InternalError("symmetry flag contradicts the transpose partner");
    std::vector<int64_t> row_cnt(n, 0), col_cnt(n, 0);
    for (auto [u, v] : el.support) {
      if (cls[static_cast<size_t>(v) * n + u] != tp)
        throw InternalError("transpose of a support position escapes the partner");
      if (!el.symmetric && cls[static_cast<size_t>(v) * n + u] == e)
        throw InternalError("asymmetric element overlaps its transpose");
      ++row_cnt[u];
      ++col_cnt[v];
    }
    for (int u = 0; u < n; ++u) {
      if (row_cnt[u] && row_cnt[u] != el.row_degree)
        throw InternalError("row degree is not constant");
      if (col_cnt[u] && col_cnt[u] != el.col_degree)
        throw InternalError("column degree is not constant");
    }
  }
}

StructureTensor structure_tensor(const CanonicalBasis& basis) {
  int n = basis.n;
  int d = basis.dim();
  auto cls = basis.position_class();

  // per element: supports grouped by row
  std::vector<std::vector<std::vector<int>>> rows_of(d);
  for (int e = 0; e < d; ++e) {
    rows_of[e].assign(n, {});
    for (auto [u, v] : basis.elements[e].support) rows_of[e][u].push_back(v);
  }

  StructureTensor tensor;
  tensor.d = d;
  tensor.slices.resize(static_cast<size_t>(d) * d);
  std::vector<int64_t> prod(static_cast<size_t>(n) * n);
  std::vector<int64_t> class_val(d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      std::fill(prod.begin(), prod.end(), 0);
      for (auto [u, w] : basis.elements[i].support)
        for (int v : rows_of[j][w]) ++prod[static_cast<size_t>(u) * n + v];
      std::fill(class_val.begin(), class_val.end(), -1);
      for (size_t p = 0; p < prod.size(); ++p) {
        int k = cls[p];
        if (class_val[k] < 0)
          class_val[k] = prod[p];
        else if (class_val[k] != prod[p])
          throw InternalError(
              "product of basis elements is not constant on a class; "
              "input basis is not coherent");
      }
      auto& s = tensor.slices[static_cast<size_t>(i) * d + j];
      for (int k = 0; k < d; ++k)
        if (class_val[k] > 0) s.emplace_back(k, class_val[k]);
    }
  }
  return tensor;
}

namespace {

struct ElementKey {
  bool diagonal, symmetric;
  int64_t row_degree, col_degree;
  size_t size;
  auto operator<=>(const ElementKey&) const = default;
};

ElementKey key_of(const BasisElement& el) {
  return {el.diagonal, el.symmetric, el.row_degree, el.col_degree,
          el.support.size()};
}

// checks every tensor entry whose three indices are all assigned
bool tensors_consistent(const StructureTensor& ta, const StructureTensor& tb,
                        const std::vector<int>& iota,
                        const std::vector<int>& inv,
                        const std::vector<int>& assigned) {
  for (int p : assigned) {
    for (int q : assigned) {
      for (const auto& [k, t] : ta.slice(p, q))
        if (iota[k] >= 0 && tb.at(iota[p], iota[q], iota[k]) != t) return false;
      for (const auto& [k2, t2] : tb.slice(iota[p], iota[q]))
        if (inv[k2] >= 0 && ta.at(p, q, inv[k2]) != t2) return false;
    }
  }
  return true;
}

}  // namespace

std::optional<std::vector<int>> match_algebras(const CanonicalBasis& a,
                                               const StructureTensor& ta,
                                               const CanonicalBasis& b,
                                               const StructureTensor& tb) {
  int d = a.dim();
  if (d != b.dim() || a.n != b.n) return std::nullopt;

  std::vector<std::vector<int>> candidates(d);
  for (int i = 0; i < d; ++i) {
    auto ka = key_of(a.elements[i]);
    for (int j = 0; j < d; ++j)
      if (ka == key_of(b.elements[j])) candidates[i].push_back(j);
    if (candidates[i].empty()) return std::nullopt;
  }

  std::vector<int> order(d);
  for (int i = 0; i < d; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    if (candidates[x].size() != candidates[y].size())
      return candidates[x].size() < candidates[y].size();
    return x < y;
  });

  std::vector<int> iota(d, -1), inv(d, -1), assigned;
  assigned.reserve(d);

  auto search = [&](auto&& self, size_t depth) -> bool {
    if (depth == order.size()) return true;
    int i = order[depth];
    for (int j : candidates[i]) {
      if (inv[j] >= 0) continue;
      int pa = a.elements[i].transpose_partner;
      int pb = b.elements[j].transpose_partner;
      if (iota[pa] >= 0 && iota[pa] != pb) continue;
      if (inv[pb] >= 0 && inv[pb] != pa) continue;
      iota[i] = j;
      inv[j] = i;
      assigned.push_back(i);
      if (tensors_consistent(ta, tb, iota, inv, assigned) &&
          self(self, depth + 1))
        return true;
      assigned.pop_back();
      iota[i] = -1;
      inv[j] = -1;
    }
    return false;
  };

  if (!search(search, 0)) return std::nullopt;
  return iota;
}

namespace {

// weights 1..p over off-diagonal classes in element order, transpose
// partners sharing a weight
std::vector<int64_t> canonical_weights(const CanonicalBasis& basis) {
  std::vector<int64_t> w(basis.dim(), 0);
  int64_t next = 1;
  for (int e = 0; e < basis.dim(); ++e) {
    const auto& el = basis.elements[e];
    if (el.diagonal || w[e] != 0) continue;
    w[e] = next;
    w[el.transpose_partner] = next;
    ++next;
  }
  int64_t pair_cap =
      static_cast<int64_t>(basis.n) * (basis.n - 1) / 2;
  if (next - 1 > pair_cap)
    throw InternalError("weight count exceeded the off-diagonal pair bound");
  return w;
}

AdjacencyMatrix weighted_reduction(const CanonicalBasis& basis,
                                   const std::vector<int64_t>& weights,
                                   int64_t* out_row_sum) {
  int n = basis.n;
  std::vector<int64_t> m(static_cast<size_t>(n) * n, 0);
  for (int e = 0; e < basis.dim(); ++e) {
    if (basis.elements[e].diagonal) continue;
    for (auto [u, v] : basis.elements[e].support)
      m[static_cast<size_t>(u) * n + v] = weights[e];
  }
  std::vector<int64_t> rows(n, 0);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) rows[u] += m[static_cast<size_t>(u) * n + v];
  int64_t target = *std::max_element(rows.begin(), rows.end()) + 1;
  for (int u = 0; u < n; ++u)
    m[static_cast<size_t>(u) * n + u] = target - rows[u];

  // the diagonal fill must be constant on each diagonal class
  auto cls = basis.position_class();
  std::vector<int64_t> fill(basis.dim(), -1);
  for (int u = 0; u < n; ++u) {
    int k = cls[static_cast<size_t>(u) * n + u];
    int64_t v = m[static_cast<size_t>(u) * n + u];
    if (fill[k] < 0)
      fill[k] = v;
    else if (fill[k] != v)
      throw InternalError("diagonal fill is not constant on a diagonal class");
  }

  int64_t cap = static_cast<int64_t>(n) * n * n;
  for (int64_t v : m)
    if (v >= cap) throw InternalError("reduced entry reached the n^3 bound");
  *out_row_sum = target;
  return AdjacencyMatrix::build(n, std::move(m));
}

AdjacencyMatrix raw_plus_diagonal(const AdjacencyMatrix& raw,
                                  int64_t* out_row_sum) {
  if (!raw.symmetric())
    throw std::invalid_argument("the raw reduction variant needs a symmetric matrix");
  auto rows = raw.row_sums();
  int64_t target = *std::max_element(rows.begin(), rows.end()) + 1;
  std::vector<int64_t> m = raw.entries;
  for (int u = 0; u < raw.n; ++u)
    m[static_cast<size_t>(u) * raw.n + u] += target - rows[u];
  *out_row_sum = target;
  return AdjacencyMatrix::build(raw.n, std::move(m));
}

}  // namespace

ReducedPair reduce_to_regular_pair(const CanonicalBasis& a,
                                   const CanonicalBasis& b,
                                   const std::vector<int>& iota,
                                   ReductionReading reading,
                                   const AdjacencyMatrix* raw_a,
                                   const AdjacencyMatrix* raw_b) {
  if (static_cast<int>(iota.size()) != a.dim() || a.dim() != b.dim())
    throw std::invalid_argument("isomorphism size does not match the bases");

  ReducedPair out;
  if (reading == ReductionReading::RawPlusDiagonal) {
    if (!raw_a || !raw_b)
      throw std::invalid_argument("the raw reduction variant needs the originals");
    out.a1 = raw_plus_diagonal(*raw_a, &out.row_sum_a);
    out.b1 = raw_plus_diagonal(*raw_b, &out.row_sum_b);
    return out;
  }

  out.weights_a = canonical_weights(a);
  out.weights_b = canonical_weights(b);
  for (int e = 0; e < a.dim(); ++e)
    if (out.weights_b[iota[e]] != out.weights_a[e])
      out.iota_weight_consistent = false;
  out.a1 = weighted_reduction(a, out.weights_a, &out.row_sum_a);
  out.b1 = weighted_reduction(b, out.weights_b, &out.row_sum_b);

  for (const auto* m : {&out.a1, &out.b1}) {
    if (!m->symmetric())
      throw InternalError("reduced matrix is not symmetric");
    if (!m->connected) throw InternalError("reduced matrix is not connected");
    if (!m->degree.has_value())
      throw InternalError("reduced matrix is not regular");
  }
  return out;
}

bool traces_of_powers_equal(const AdjacencyMatrix& a, const AdjacencyMatrix& b) {
  if (a.n != b.n) return false;
  int n = a.n;
  auto traces = [n](const AdjacencyMatrix& m) {
    std::vector<mpz_class> base(static_cast<size_t>(n) * n);
    for (size_t p = 0; p < base.size(); ++p) base[p] = m.entries[p];
    std::vector<mpz_class> power = base, next(base.size());
    std::vector<mpz_class> tr;
    tr.reserve(n);
    for (int k = 1; k <= n; ++k) {
      mpz_class t = 0;
      for (int i = 0; i < n; ++i) t += power[static_cast<size_t>(i) * n + i];
      tr.push_back(t);
      if (k == n) break;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          mpz_class acc = 0;
          for (int l = 0; l < n; ++l)
            acc += power[static_cast<size_t>(i) * n + l] *
                   base[static_cast<size_t>(l) * n + j];
          next[static_cast<size_t>(i) * n + j] = acc;
        }
      std::swap(power, next);
    }
    return tr;
  };
  return traces(a) == traces(b);
}

std::string dump_basis(const CanonicalBasis& basis, const StructureTensor& tensor) {
  std::ostringstream out;
  out << "n " << basis.n << "\n";
  out << "d " << basis.dim() << "\n";
  for (int e = 0; e < basis.dim(); ++e) {
    const auto& el = basis.elements[e];
    out << "E " << (e + 1) << " : "
        << (el.diagonal ? "diagonal" : "off-diagonal") << ' '
        << (el.symmetric ? "symmetric" : "asymmetric");
    if (!el.symmetric) out << " partner=" << (el.transpose_partner + 1);
    out << " r=" << el.row_degree << " c=" << el.col_degree
        << " size=" << el.support.size() << "\n ";
    for (auto [u, v] : el.support) out << " (" << u << ',' << v << ')';
    out << "\n";
  }
  out << "tensor\n";
  for (int i = 0; i < tensor.d; ++i)
    for (int j = 0; j < tensor.d; ++j)
      for (const auto& [k, t] : tensor.slice(i, j))
        out << '(' << (i + 1) << ',' << (j + 1) << ',' << (k + 1) << ") " << t
            << "\n";
  out << "end\n";
  return out.str();
}

}  // namespace permsim
