#include "rti/treebank.hpp"

#include <algorithm>

#include "rti/text.hpp"

namespace rti::treebank {

namespace {

const char* kind_name(ParseErrorKind k) {
  switch (k) {
    case ParseErrorKind::UnbalancedBrackets:
      return "UnbalancedBrackets";
    case ParseErrorKind::EmptyLabel:
      return "EmptyLabel";
    case ParseErrorKind::EmptyTree:
      return "EmptyTree";
    case ParseErrorKind::TraceLeaf:
      return "TraceLeaf";
    case ParseErrorKind::MalformedNode:
      return "MalformedNode";
  }
  return "ParseError";
}

bool is_delim(char c) {
  return c == '(' || c == ')' || c == ' ' || c == '\t' || c == '\n' || c == '\r' ||
         c == '\v' || c == '\f';
}

struct Parser {
  std::string_view src;
  std::size_t pos = 0;
  int next_leaf = 0;

  [[noreturn]] void fail(ParseErrorKind kind, std::size_t at, const std::string& detail) {
    throw ParseError(kind, at, detail);
  }

  void skip_ws() {
    while (pos < src.size() && is_delim(src[pos]) && src[pos] != '(' && src[pos] != ')') ++pos;
  }

  std::string atom() {
    std::size_t start = pos;
    while (pos < src.size() && !is_delim(src[pos])) ++pos;
    return std::string(src.substr(start, pos - start));
  }

  TreeNode node() {
    skip_ws();
    if (pos >= src.size() || src[pos] != '(')
      fail(ParseErrorKind::UnbalancedBrackets, pos, "expected '('");
    std::size_t open_at = pos;
    ++pos;
    skip_ws();
    if (pos < src.size() && src[pos] == ')')
      fail(ParseErrorKind::EmptyLabel, pos, "node without label");
    std::size_t label_at = pos;
    TreeNode n;
    n.label = atom();
    if (n.label.empty()) fail(ParseErrorKind::EmptyLabel, label_at, "node without label");
    skip_ws();
    if (pos >= src.size()) fail(ParseErrorKind::UnbalancedBrackets, pos, "unexpected end of input");
    if (src[pos] == '(') {
      n.span_begin = next_leaf;
      while (true) {
        n.children.push_back(node());
        skip_ws();
        if (pos >= src.size())
          fail(ParseErrorKind::UnbalancedBrackets, pos, "unexpected end of input");
        if (src[pos] == ')') break;
        if (src[pos] != '(')
          fail(ParseErrorKind::MalformedNode, pos, "token mixed with subtrees");
      }
      ++pos;
      n.span_end = next_leaf;
      return n;
    }
    if (src[pos] == ')') fail(ParseErrorKind::MalformedNode, pos, "node without body");
    std::size_t token_at = pos;
    n.token = atom();
    if (n.label == "-NONE-")
      fail(ParseErrorKind::TraceLeaf, open_at, "empty constituent / trace leaf");
    skip_ws();
    if (pos >= src.size()) fail(ParseErrorKind::UnbalancedBrackets, pos, "unexpected end of input");
    if (src[pos] != ')')
      fail(ParseErrorKind::MalformedNode, token_at, "leaf with more than one token");
    ++pos;
    n.span_begin = next_leaf;
    n.span_end = ++next_leaf;
    return n;
  }
};

void serialize_node(const TreeNode& n, std::string& out) {
  out.push_back('(');
  out.append(n.label);
  if (n.is_leaf()) {
    out.push_back(' ');
    out.append(n.token);
  } else {
    for (const TreeNode& c : n.children) {
      out.push_back(' ');
      serialize_node(c, out);
    }
  }
  out.push_back(')');
}

void collect_leaves(const TreeNode& n, std::vector<std::string>& out) {
  if (n.is_leaf()) {
    out.push_back(n.token);
    return;
  }
  for (const TreeNode& c : n.children) collect_leaves(c, out);
}

}  // namespace

ParseError::ParseError(ParseErrorKind kind, std::size_t offset, const std::string& detail)
    : std::runtime_error(std::string(kind_name(kind)) + " at byte " + std::to_string(offset) +
                         ": " + detail),
      kind_(kind),
      offset_(offset) {}

std::string_view base_label(std::string_view label) {
  std::size_t dash = label.find('-');
  if (dash == std::string_view::npos || dash == 0) return label;
  return label.substr(0, dash);
}

ConstituencyTree ConstituencyTree::parse(std::string_view source, std::string sentence_id) {
  Parser p{source};
  p.skip_ws();
  if (p.pos >= source.size())
    throw ParseError(ParseErrorKind::EmptyTree, p.pos, "no tree in input");

  // Unwrap the treebank outer shell "( (S ...) )": a top-level '(' whose
  // body starts with another '(' instead of a label.
  bool wrapped = false;
  if (source[p.pos] == '(') {
    std::size_t look = p.pos + 1;
    while (look < source.size() && is_delim(source[look]) && source[look] != '(' &&
           source[look] != ')')
      ++look;
    wrapped = look < source.size() && source[look] == '(';
  }

  ConstituencyTree tree;
  tree.sentence_id_ = std::move(sentence_id);
  if (wrapped) {
    ++p.pos;
    tree.root_ = p.node();
    p.skip_ws();
    if (p.pos >= source.size())
      throw ParseError(ParseErrorKind::UnbalancedBrackets, p.pos, "unexpected end of input");
    if (source[p.pos] == '(')
      throw ParseError(ParseErrorKind::MalformedNode, p.pos,
                       "outer shell must contain exactly one tree");
    ++p.pos;  // closing ')' of the shell
  } else {
    tree.root_ = p.node();
  }
  p.skip_ws();
  if (p.pos < source.size())
    throw ParseError(ParseErrorKind::UnbalancedBrackets, p.pos, "trailing content after tree");
  return tree;
}

const TreeNode& ConstituencyTree::node_at(const NodePath& path) const {
  const TreeNode* n = &root_;
  for (int idx : path) {
    if (idx < 0 || idx >= static_cast<int>(n->children.size()))
      throw std::out_of_range("node path does not exist in tree");
    n = &n->children[static_cast<std::size_t>(idx)];
  }
  return *n;
}

std::vector<std::string> ConstituencyTree::yield_tokens(const TreeNode& node) const {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(node.span_width()));
  collect_leaves(node, out);
  return out;
}

std::string ConstituencyTree::yield_text(const TreeNode& node) const {
  return text::join(yield_tokens(node));
}

std::vector<NodePath> ConstituencyTree::ancestors_with_label(const NodePath& path,
                                                             std::string_view label) const {
  std::vector<NodePath> out;
  const TreeNode* n = &root_;
  NodePath prefix;
  // Walk root -> node, collecting matches; reverse for innermost-first.
  for (int idx : path) {
    if (base_label(n->label) == label) out.push_back(prefix);
    if (idx < 0 || idx >= static_cast<int>(n->children.size()))
      throw std::out_of_range("node path does not exist in tree");
    prefix.push_back(idx);
    n = &n->children[static_cast<std::size_t>(idx)];
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::string ConstituencyTree::serialize() const {
  std::string out;
  serialize_node(root_, out);
  return out;
}

}  // namespace rti::treebank
