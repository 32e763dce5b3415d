#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Penn-Treebank-style bracketed constituency trees. Trees arrive pre-parsed
// alongside each corpus sentence; this module only reads and navigates them.
namespace rti::treebank {

enum class ParseErrorKind {
  UnbalancedBrackets,
  EmptyLabel,
  EmptyTree,
  TraceLeaf,
  MalformedNode,
};

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, std::size_t offset, const std::string& detail);
  ParseErrorKind kind() const { return kind_; }
  // Byte offset into the bracketed source where the fault was detected.
  std::size_t offset() const { return offset_; }

 private:
  ParseErrorKind kind_;
  std::size_t offset_;
};

struct TreeNode {
  std::string label;
  std::string token;               // leaves only
  std::vector<TreeNode> children;  // empty for leaves
  int span_begin = 0;              // half-open token interval [begin, end)
  int span_end = 0;

  bool is_leaf() const { return children.empty(); }
  int span_width() const { return span_end - span_begin; }
};

// Position of a node as child indices from the root; empty path = root.
using NodePath = std::vector<int>;

// "NP-SBJ-1" -> "NP". Labels with a leading hyphen (-LRB-, -NONE-) are
// kept whole so they never strip to empty.
std::string_view base_label(std::string_view label);

class ConstituencyTree {
 public:
  ConstituencyTree() = default;

  // Parses one bracketed tree. Rejects "-NONE-" trace leaves.
  static ConstituencyTree parse(std::string_view source, std::string sentence_id = {});

  const TreeNode& root() const { return root_; }
  const std::string& sentence_id() const { return sentence_id_; }

  const TreeNode& node_at(const NodePath& path) const;

  // Leaves under `node`, in order. Length equals the node's span width.
  std::vector<std::string> yield_tokens(const TreeNode& node) const;
  std::vector<std::string> yield_tokens() const { return yield_tokens(root_); }
  std::string yield_text(const TreeNode& node) const;

  // Strict ancestors of `path` whose base label equals `label`,
  // innermost first.
  std::vector<NodePath> ancestors_with_label(const NodePath& path, std::string_view label) const;

  // Canonical single-space bracketed form.
  std::string serialize() const;

  // Visits every node in pre-order as f(node, path).
  template <typename F>
  void for_each_preorder(F&& f) const {
    NodePath path;
    visit_preorder(root_, path, f);
  }

 private:
  template <typename F>
  static void visit_preorder(const TreeNode& node, NodePath& path, F& f) {
    f(node, const_cast<const NodePath&>(path));
    for (int i = 0; i < static_cast<int>(node.children.size()); ++i) {
      path.push_back(i);
      visit_preorder(node.children[static_cast<std::size_t>(i)], path, f);
      path.pop_back();
    }
  }

  TreeNode root_;
  std::string sentence_id_;
};

}  // namespace rti::treebank
