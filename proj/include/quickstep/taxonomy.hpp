#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "quickstep/common.hpp"

namespace quickstep {

using TopicId = std::string;

/// Raised for malformed or structurally invalid taxonomy input.
class TaxonomyError : public Error {
public:
    using Error::Error;
};

struct TopicNode {
    TopicId id;
    std::string label;
    std::optional<TopicId> parent;  // empty only for the root

    bool operator==(const TopicNode&) const = default;
};

enum class TaxonomyMode { flat, hierarchical };

/// The topic scheme of one group: a tree under a synthetic root.
///
/// Values are immutable snapshots. add_topic() returns a new taxonomy; nodes
/// keep their insertion order so a saved file only ever grows.
class Taxonomy {
public:
    static constexpr std::string_view kRootId = "top";

    /// A taxonomy holding just the root.
    explicit Taxonomy(TaxonomyMode mode);

    /// Validates a node list (any order); throws TaxonomyError.
    static Taxonomy from_nodes(TaxonomyMode mode, std::vector<TopicNode> nodes);

    TaxonomyMode mode() const { return mode_; }
    const TopicId& root() const { return nodes_[root_index_].id; }
    const std::vector<TopicNode>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }

    bool contains(std::string_view id) const { return index_.count(std::string(id)) != 0; }
    const TopicNode& node(std::string_view id) const;
    const TopicNode* find_by_label(std::string_view label) const;
    std::vector<TopicId> children(std::string_view id) const;

    /// Nearest first, root last, the topic itself excluded.
    std::vector<TopicId> ancestors(std::string_view id) const;
    /// Number of edges from the root; 0 for the root.
    int depth(std::string_view id) const;
    int max_depth() const;

    /// Returns the extended taxonomy. Flat mode attaches to the root;
    /// hierarchical mode is locked unless `admin_override` is set.
    Taxonomy add_topic(std::string_view label, const std::optional<TopicId>& parent = std::nullopt,
        bool admin_override = false) const;

    /// Lines of `<id>\t<label>\t<parent-or-"-">`, in insertion order.
    std::string serialize() const;

    bool operator==(const Taxonomy& other) const { return mode_ == other.mode_ && nodes_ == other.nodes_; }

private:
    void rebuild_index();

    TaxonomyMode mode_;
    std::vector<TopicNode> nodes_;
    std::unordered_map<TopicId, std::size_t> index_;
    std::size_t root_index_ = 0;
};

/// Lower-case slug: runs of non-alphanumerics become a single '-'.
TopicId slugify(std::string_view label);

TopicNode parse_taxonomy_line(std::string_view line, std::size_t line_no);
std::string format_taxonomy_line(const TopicNode& node);

Taxonomy parse_taxonomy(std::string_view content, TaxonomyMode mode);
Taxonomy load_taxonomy(const std::filesystem::path& path, TaxonomyMode mode);

/// The same topics with every non-root node re-parented to the root.
Taxonomy flatten(const Taxonomy& t);

}  // namespace quickstep
