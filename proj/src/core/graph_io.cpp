#include "core/graph_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <sstream>
#include <vector>

namespace permsim {

bool AdjacencyMatrix::symmetric() const {
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((*this)(i, j) != (*this)(j, i)) return false;
  return true;
}

std::vector<int64_t> AdjacencyMatrix::row_sums() const {
  std::vector<int64_t> r(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r[i] += (*this)(i, j);
  return r;
}

std::vector<int64_t> AdjacencyMatrix::col_sums() const {
  std::vector<int64_t> c(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) c[j] += (*this)(i, j);
  return c;
}

AdjacencyMatrix AdjacencyMatrix::build(int n, std::vector<int64_t> entries) {
  if (n <= 0) throw std::invalid_argument("matrix order must be positive");
  if (entries.size() != static_cast<size_t>(n) * n)
    throw std::invalid_argument("entry count does not match matrix order");
  for (int64_t v : entries)
    if (v < 0) throw std::invalid_argument("entries must be nonnegative");

  AdjacencyMatrix a;
  a.n = n;
  a.entries = std::move(entries);

  auto rows = a.row_sums();
  auto cols = a.col_sums();
  bool regular = true;
  for (int i = 0; i < n; ++i)
    if (rows[i] != rows[0] || cols[i] != rows[0]) regular = false;
  if (regular) a.degree = rows[0];

  // connectivity of the symmetrized support
  std::vector<int> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int visited = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v = 0; v < n; ++v) {
      if (!seen[v] && (a(u, v) != 0 || a(v, u) != 0)) {
        seen[v] = 1;
        ++visited;
        stack.push_back(v);
      }
    }
  }
  a.connected = (visited == n);
  return a;
}

bool operator==(const AdjacencyMatrix& a, const AdjacencyMatrix& b) {
  return a.n == b.n && a.entries == b.entries;
}

ValidationResult validate_input(const AdjacencyMatrix& a) {
  if (!a.degree.has_value() || !a.symmetric())
    return {InputClass::NotRegular, 0};
  if (!a.connected) return {InputClass::Disconnected, 0};
  return {InputClass::Regular, *a.degree};
}

namespace {

constexpr int kG6Low = 63;    // '?'
constexpr int kG6High = 126;  // '~'

struct Cursor {
  std::string_view text;
  size_t pos = 0;
  size_t line = 1;
  size_t line_start = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line, pos - line_start + 1);
  }
  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  void advance() {
    if (text[pos] == '\n') {
      ++line;
      line_start = pos + 1;
    }
    ++pos;
  }
  void skip_space() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek())))
      advance();
  }
};

int64_t parse_int64(Cursor& c, bool allow_huge_error) {
  c.skip_space();
  if (c.eof()) c.fail("unexpected end of input, expected an integer");
  size_t start = c.pos;
  if (c.peek() == '-') c.fail("negative values are not allowed");
  while (!c.eof() && std::isdigit(static_cast<unsigned char>(c.peek())))
    c.advance();
  if (c.pos == start) c.fail(std::string("unexpected character '") +
                             c.peek() + "', expected an integer");
  uint64_t value = 0;
  auto sv = c.text.substr(start, c.pos - start);
  auto res = std::from_chars(sv.data(), sv.data() + sv.size(), value);
  if (res.ec != std::errc() ||
      value > static_cast<uint64_t>(std::numeric_limits<int64_t>::max())) {
    if (allow_huge_error) c.fail("integer exceeds the 2^63-1 multiplicity cap");
    c.fail("integer out of range");
  }
  return static_cast<int64_t>(value);
}

bool next_token(Cursor& c, std::string_view& tok) {
  while (!c.eof()) {
    char ch = c.peek();
    if (ch == '#') {  // comment to end of line
      while (!c.eof() && c.peek() != '\n') c.advance();
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch)) || ch == ';') {
      c.advance();
      continue;
    }
    break;
  }
  if (c.eof()) return false;
  size_t start = c.pos;
  while (!c.eof()) {
    char ch = c.peek();
    if (std::isspace(static_cast<unsigned char>(ch)) || ch == ';' || ch == '#')
      break;
    c.advance();
  }
  tok = c.text.substr(start, c.pos - start);
  return true;
}

int64_t token_to_count(Cursor& c, std::string_view tok) {
  uint64_t value = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() ||
      value > static_cast<uint64_t>(std::numeric_limits<int64_t>::max()))
    c.fail("expected a nonnegative integer, got '" + std::string(tok) + "'");
  return static_cast<int64_t>(value);
}

// ---- graph6 ----

AdjacencyMatrix parse_graph6(std::string_view text) {
  Cursor c{text};
  c.skip_space();
  constexpr std::string_view header = ">>graph6<<";
  if (text.substr(c.pos, header.size()) == header) c.pos += header.size();
  if (c.eof()) c.fail("empty graph6 input");

  auto byte = [&](const char* what) -> int {
    if (c.eof()) c.fail(std::string("graph6 input truncated in ") + what);
    unsigned char ch = static_cast<unsigned char>(c.peek());
    if (ch < kG6Low || ch > kG6High)
      c.fail(std::string("invalid graph6 byte in ") + what);
    c.advance();
    return ch - kG6Low;
  };

  int64_t n = 0;
  int first = byte("order field");
  if (first < 63) {
    n = first;
  } else {  // first == 63 means '~': extended order
    int b0 = byte("order field");
    if (b0 == 63) c.fail("graph6 orders above 258047 are not supported");
    int b1 = byte("order field");
    int b2 = byte("order field");
    n = (static_cast<int64_t>(b0) << 12) | (b1 << 6) | b2;
  }
  if (n <= 0) c.fail("graph6 order must be positive");
  if (n > 4096) c.fail("graph6 order too large for this tool");

  std::vector<int64_t> m(static_cast<size_t>(n) * n, 0);
  int bits = 0, acc = 0;
  for (int j = 1; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      if (bits == 0) {
        acc = byte("adjacency bits");
        bits = 6;
      }
      int bit = (acc >> (bits - 1)) & 1;
      --bits;
      if (bit) {
        m[static_cast<size_t>(i) * n + j] = 1;
        m[static_cast<size_t>(j) * n + i] = 1;
      }
    }
  }
  c.skip_space();
  if (!c.eof()) c.fail("trailing bytes after graph6 string");
  return AdjacencyMatrix::build(static_cast<int>(n), std::move(m));
}

std::string serialize_graph6(const AdjacencyMatrix& a) {
  if (!a.symmetric())
    throw std::invalid_argument("graph6 requires a symmetric matrix");
  for (int i = 0; i < a.n; ++i) {
    if (a(i, i) != 0)
      throw std::invalid_argument("graph6 cannot represent self-loops");
    for (int j = 0; j < a.n; ++j)
      if (a(i, j) > 1)
        throw std::invalid_argument("graph6 cannot represent multi-edges");
  }
  std::string out;
  if (a.n <= 62) {
    out.push_back(static_cast<char>(a.n + kG6Low));
  } else {
    out.push_back(static_cast<char>(kG6High));
    out.push_back(static_cast<char>(((a.n >> 12) & 63) + kG6Low));
    out.push_back(static_cast<char>(((a.n >> 6) & 63) + kG6Low));
    out.push_back(static_cast<char>((a.n & 63) + kG6Low));
  }
  int bits = 0, acc = 0;
  for (int j = 1; j < a.n; ++j) {
    for (int i = 0; i < j; ++i) {
      acc = (acc << 1) | static_cast<int>(a(i, j));
      if (++bits == 6) {
        out.push_back(static_cast<char>(acc + kG6Low));
        bits = 0;
        acc = 0;
      }
    }
  }
  if (bits > 0) out.push_back(static_cast<char>((acc << (6 - bits)) + kG6Low));
  return out;
}

// ---- DIMACS edge ----

AdjacencyMatrix parse_dimacs(std::string_view text) {
  int64_t n = -1;
  std::vector<int64_t> m;
  size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    char tag = line[first];
    std::istringstream ls(line.substr(first + 1));
    if (tag == 'c') continue;
    if (tag == 'p') {
      if (n >= 0) throw ParseError("duplicate problem line", line_no, 1);
      std::string kind;
      int64_t declared_edges = 0;
      if (!(ls >> kind >> n >> declared_edges) ||
          (kind != "edge" && kind != "edges" && kind != "col"))
        throw ParseError("malformed problem line, expected 'p edge <n> <m>'",
                         line_no, 1);
      if (n <= 0) throw ParseError("vertex count must be positive", line_no, 1);
      m.assign(static_cast<size_t>(n) * n, 0);
      continue;
    }
    if (tag == 'e') {
      if (n < 0)
        throw ParseError("edge line before the problem line", line_no, 1);
      int64_t u = 0, v = 0;
      if (!(ls >> u >> v))
        throw ParseError("malformed edge line, expected 'e <u> <v>'", line_no,
                         1);
      if (u < 1 || u > n || v < 1 || v > n)
        throw ParseError("edge endpoint out of range", line_no, 1);
      size_t uv = static_cast<size_t>(u - 1) * n + (v - 1);
      size_t vu = static_cast<size_t>(v - 1) * n + (u - 1);
      if (m[uv] == std::numeric_limits<int64_t>::max())
        throw ParseError("edge multiplicity exceeds the 2^63-1 cap", line_no,
                         1);
      ++m[uv];
      if (u != v) ++m[vu];
      continue;
    }
    throw ParseError(std::string("unrecognized line tag '") + tag + "'",
                     line_no, 1);
  }
  if (n < 0) throw ParseError("missing problem line", line_no ? line_no : 1, 1);
  return AdjacencyMatrix::build(static_cast<int>(n), std::move(m));
}

std::string serialize_dimacs(const AdjacencyMatrix& a) {
  if (!a.symmetric())
    throw std::invalid_argument("dimacs-edge requires a symmetric matrix");
  int64_t edge_lines = 0;
  for (int i = 0; i < a.n; ++i)
    for (int j = i; j < a.n; ++j) edge_lines += a(i, j);
  std::ostringstream out;
  out << "p edge " << a.n << ' ' << edge_lines << '\n';
  for (int i = 0; i < a.n; ++i)
    for (int j = i; j < a.n; ++j)
      for (int64_t k = 0; k < a(i, j); ++k)
        out << "e " << (i + 1) << ' ' << (j + 1) << '\n';
  return out.str();
}

// ---- edge list ----

AdjacencyMatrix parse_edge_list(std::string_view text) {
  Cursor c{text};
  std::vector<std::pair<int64_t, int64_t>> edges;
  int64_t declared_n = -1;
  std::string_view tok;
  bool first_token = true;
  while (next_token(c, tok)) {
    if (first_token && tok == "n") {
      if (!next_token(c, tok)) c.fail("missing vertex count after 'n'");
      declared_n = token_to_count(c, tok);
      if (declared_n <= 0) c.fail("vertex count must be positive");
      first_token = false;
      continue;
    }
    first_token = false;
    int64_t u = token_to_count(c, tok);
    if (!next_token(c, tok)) c.fail("dangling endpoint, edges come in pairs");
    int64_t v = token_to_count(c, tok);
    edges.emplace_back(u, v);
  }
  if (edges.empty() && declared_n < 0)
    throw ParseError("empty edge list and no 'n' directive", 1, 1);

  int64_t min_label = std::numeric_limits<int64_t>::max();
  int64_t max_label = 0;
  for (auto [u, v] : edges) {
    min_label = std::min({min_label, u, v});
    max_label = std::max({max_label, u, v});
  }
  // 1-based unless a 0 label appears
  int64_t base = (!edges.empty() && min_label == 0) ? 0 : 1;
  int64_t n = declared_n >= 0 ? declared_n : max_label - base + 1;
  if (!edges.empty() && max_label - base + 1 > n)
    throw ParseError("edge endpoint exceeds the declared vertex count", 1, 1);
  if (n <= 0) throw ParseError("could not infer a positive vertex count", 1, 1);

  std::vector<int64_t> m(static_cast<size_t>(n) * n, 0);
  for (auto [u, v] : edges) {
    int64_t i = u - base, j = v - base;
    size_t ij = static_cast<size_t>(i) * n + j;
    size_t ji = static_cast<size_t>(j) * n + i;
    if (m[ij] == std::numeric_limits<int64_t>::max())
      throw ParseError("edge multiplicity exceeds the 2^63-1 cap", 1, 1);
    ++m[ij];
    if (i != j) ++m[ji];
  }
  return AdjacencyMatrix::build(static_cast<int>(n), std::move(m));
}

std::string serialize_edge_list(const AdjacencyMatrix& a) {
  if (!a.symmetric())
    throw std::invalid_argument("edge-list requires a symmetric matrix");
  std::ostringstream out;
  out << "n " << a.n << '\n';
  for (int i = 0; i < a.n; ++i)
    for (int j = i; j < a.n; ++j)
      for (int64_t k = 0; k < a(i, j); ++k)
        out << (i + 1) << ' ' << (j + 1) << '\n';
  return out.str();
}

// ---- dense matrix ----

AdjacencyMatrix parse_dense(std::string_view text) {
  Cursor c{text};
  std::vector<int64_t> vals;
  c.skip_space();
  while (!c.eof()) {
    vals.push_back(parse_int64(c, true));
    c.skip_space();
  }
  if (vals.empty()) throw ParseError("empty dense matrix", 1, 1);
  size_t n = 0;
  while (n * n < vals.size()) ++n;
  if (n * n != vals.size())
    throw ParseError("dense matrix is not square: " +
                         std::to_string(vals.size()) +
                         " entries is not a perfect square",
                     c.line, 1);
  return AdjacencyMatrix::build(static_cast<int>(n), std::move(vals));
}

std::string serialize_dense(const AdjacencyMatrix& a) {
  std::ostringstream out;
  for (int i = 0; i < a.n; ++i) {
    for (int j = 0; j < a.n; ++j) {
      if (j) out << ' ';
      out << a(i, j);
    }
    out << '\n';
  }
  return out.str();
}

bool all_integer_tokens(std::string_view text, size_t& count) {
  Cursor c{text};
  std::string_view tok;
  count = 0;
  while (next_token(c, tok)) {
    for (char ch : tok)
      if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
    ++count;
  }
  return count > 0;
}

}  // namespace

GraphFormat detect_format(std::string_view text) {
  size_t pos = text.find_first_not_of(" \t\r\n");
  if (pos == std::string_view::npos)
    throw ParseError("empty input", 1, 1);
  if (text.substr(pos, 10) == ">>graph6<<") return GraphFormat::Graph6;

  // a DIMACS file always carries a problem line
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == 'p' && first + 1 < line.size() &&
        std::isspace(static_cast<unsigned char>(line[first + 1])))
      return GraphFormat::DimacsEdge;
  }

  if (text[pos] == 'n' || text.find(';') != std::string_view::npos)
    return GraphFormat::EdgeList;

  size_t tokens = 0;
  if (all_integer_tokens(text, tokens)) {
    size_t n = 0;
    while (n * n < tokens) ++n;
    if (n * n == tokens) return GraphFormat::DenseMatrix;
    if (tokens % 2 == 0) return GraphFormat::EdgeList;
    throw ParseError("numeric input is neither a square matrix nor pairs", 1,
                     1);
  }

  // single printable line in the graph6 byte range
  size_t end = text.find_first_of("\r\n", pos);
  std::string_view first_line =
      text.substr(pos, end == std::string_view::npos ? end : end - pos);
  bool g6 = !first_line.empty();
  for (char ch : first_line)
    if (static_cast<unsigned char>(ch) < kG6Low ||
        static_cast<unsigned char>(ch) > kG6High)
      g6 = false;
  if (g6 && (end == std::string_view::npos ||
             text.find_first_not_of(" \t\r\n", end) == std::string_view::npos))
    return GraphFormat::Graph6;
  throw ParseError("could not detect the input format", 1, 1);
}

AdjacencyMatrix parse_graph(std::string_view text, GraphFormat format) {
  if (format == GraphFormat::Auto) format = detect_format(text);
  switch (format) {
    case GraphFormat::Graph6:
      return parse_graph6(text);
    case GraphFormat::DimacsEdge:
      return parse_dimacs(text);
    case GraphFormat::EdgeList:
      return parse_edge_list(text);
    case GraphFormat::DenseMatrix:
      return parse_dense(text);
    default:
      throw std::invalid_argument("unknown graph format");
  }
}

std::string serialize_graph(const AdjacencyMatrix& a, GraphFormat format) {
  switch (format) {
    case GraphFormat::Graph6:
      return serialize_graph6(a);
    case GraphFormat::DimacsEdge:
      return serialize_dimacs(a);
    case GraphFormat::EdgeList:
      return serialize_edge_list(a);
    case GraphFormat::DenseMatrix:
      return serialize_dense(a);
    default:
      throw std::invalid_argument("serialization needs an explicit format");
  }
}

const char* format_name(GraphFormat f) {
  switch (f) {
    case GraphFormat::Auto:
      return "auto";
    case GraphFormat::Graph6:
      return "graph6";
    case GraphFormat::DimacsEdge:
      return "dimacs-edge";
    case GraphFormat::EdgeList:
      return "edge-list";
    case GraphFormat::DenseMatrix:
      return "dense-matrix";
  }
  return "?";
}

std::optional<GraphFormat> format_from_name(std::string_view name) {
  if (name == "auto") return GraphFormat::Auto;
  if (name == "graph6" || name == "g6") return GraphFormat::Graph6;
  if (name == "dimacs-edge" || name == "dimacs") return GraphFormat::DimacsEdge;
  if (name == "edge-list" || name == "edges") return GraphFormat::EdgeList;
  if (name == "dense-matrix" || name == "dense") return GraphFormat::DenseMatrix;
  return std::nullopt;
}

}  // namespace permsim
