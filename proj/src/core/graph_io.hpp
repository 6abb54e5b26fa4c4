#ifndef PERMSIM_CORE_GRAPH_IO_HPP
#define PERMSIM_CORE_GRAPH_IO_HPP

#include <optional>
#include <string>
#include <string_view>

#include "core/adjacency.hpp"

namespace permsim {

enum class GraphFormat { Auto, Graph6, DimacsEdge, EdgeList, DenseMatrix };

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, size_t line, size_t column)
      : std::runtime_error(msg + " (line " + std::to_string(line) +
                           ", byte " + std::to_string(column) + ")"),
        line_(line),
        column_(column) {}
  size_t line() const { return line_; }
  size_t column() const { return column_; }

 private:
  size_t line_, column_;
};

// Supported text formats:
//   graph6       one-line bit-packed simple graph (optional >>graph6<< header)
//   dimacs-edge  "c" comments, "p edge <n> <m>" header, "e <u> <v>" lines
//   edge-list    whitespace/';'-separated 1-based pairs, '#' comments,
//                optional leading "n <count>" directive
//   dense        n*n whitespace-separated nonnegative integers
AdjacencyMatrix parse_graph(std::string_view text,
                            GraphFormat format = GraphFormat::Auto);
std::string serialize_graph(const AdjacencyMatrix& a, GraphFormat format);
GraphFormat detect_format(std::string_view text);

const char* format_name(GraphFormat f);
std::optional<GraphFormat> format_from_name(std::string_view name);

}  // namespace permsim

#endif
