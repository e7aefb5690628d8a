#include "quickstep/taxonomy.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace quickstep {

Taxonomy::Taxonomy(TaxonomyMode mode)
    : mode_(mode)
{
    nodes_.push_back(TopicNode{TopicId(kRootId), std::string(kRootId), std::nullopt});
    rebuild_index();
}

void Taxonomy::rebuild_index()
{
    index_.clear();
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        index_.emplace(nodes_[i].id, i);
        if (!nodes_[i].parent) {
            root_index_ = i;
        }
    }
}

Taxonomy Taxonomy::from_nodes(TaxonomyMode mode, std::vector<TopicNode> nodes)
{
    std::unordered_map<TopicId, std::size_t> index;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!index.emplace(nodes[i].id, i).second) {
            throw TaxonomyError("duplicate topic id '" + nodes[i].id + "'");
        }
    }
    for (const auto& n : nodes) {
        if (n.parent && index.count(*n.parent) == 0) {
            throw TaxonomyError("topic '" + n.id + "' names missing parent '" + *n.parent + "'");
        }
    }
    // Walk each node up to a root; revisiting a node on the same walk is a cycle.
    std::vector<int> state(nodes.size(), 0);  // 0 new, 1 on stack, 2 done
    for (std::size_t start = 0; start < nodes.size(); ++start) {
        std::vector<std::size_t> path;
        std::size_t cur = start;
        while (state[cur] == 0) {
            state[cur] = 1;
            path.push_back(cur);
            if (!nodes[cur].parent) {
                break;
            }
            cur = index.at(*nodes[cur].parent);
        }
        if (state[cur] == 1 && nodes[cur].parent) {
            const auto from = std::find(path.begin(), path.end(), cur);
            std::string cycle;
            for (auto it = from; it != path.end(); ++it) {
                cycle += nodes[*it].id + " -> ";
            }
            cycle += nodes[cur].id;
            throw TaxonomyError("cycle in taxonomy: " + cycle);
        }
        for (const auto i : path) {
            state[i] = 2;
        }
    }
    std::vector<TopicId> roots;
    for (const auto& n : nodes) {
        if (!n.parent) {
            roots.push_back(n.id);
        }
    }
    if (roots.empty()) {
        throw TaxonomyError("taxonomy has no root");
    }
    if (roots.size() > 1) {
        throw TaxonomyError("taxonomy has multiple roots: " + roots[0] + ", " + roots[1]);
    }
    std::unordered_set<std::string> labels;
    for (const auto& n : nodes) {
        if (n.label.empty()) {
            throw TaxonomyError("topic '" + n.id + "' has an empty label");
        }
        if (!labels.insert(n.label).second) {
            throw TaxonomyError("duplicate topic label '" + n.label + "'");
        }
    }

    Taxonomy t(mode);
    t.nodes_ = std::move(nodes);
    t.rebuild_index();
    if (mode == TaxonomyMode::flat) {
        for (const auto& n : t.nodes_) {
            if (n.parent && *n.parent != t.root()) {
                throw TaxonomyError("flat taxonomy topic '" + n.id + "' is not a child of the root");
            }
        }
    }
    return t;
}

const TopicNode& Taxonomy::node(std::string_view id) const
{
    const auto it = index_.find(std::string(id));
    if (it == index_.end()) {
        throw NotFoundError("unknown topic '" + std::string(id) + "'");
    }
    return nodes_[it->second];
}

const TopicNode* Taxonomy::find_by_label(std::string_view label) const
{
    for (const auto& n : nodes_) {
        if (n.label == label) {
            return &n;
        }
    }
    return nullptr;
}

std::vector<TopicId> Taxonomy::children(std::string_view id) const
{
    std::vector<TopicId> out;
    for (const auto& n : nodes_) {
        if (n.parent && *n.parent == id) {
            out.push_back(n.id);
        }
    }
    return out;
}

std::vector<TopicId> Taxonomy::ancestors(std::string_view id) const
{
    std::vector<TopicId> out;
    const TopicNode* cur = &node(id);
    while (cur->parent) {
        out.push_back(*cur->parent);
        cur = &node(*cur->parent);
    }
    return out;
}

int Taxonomy::depth(std::string_view id) const
{
    return static_cast<int>(ancestors(id).size());
}

int Taxonomy::max_depth() const
{
    int d = 0;
    for (const auto& n : nodes_) {
        d = std::max(d, depth(n.id));
    }
    return d;
}

Taxonomy Taxonomy::add_topic(std::string_view label, const std::optional<TopicId>& parent, bool admin_override) const
{
    const std::string clean(trim(label));
    if (clean.empty() || !is_clean_field(clean)) {
        throw InvalidRequest("topic label must be non-empty single-line text");
    }
    if (mode_ == TaxonomyMode::hierarchical && !admin_override) {
        throw InvalidRequest("the topic ontology is fixed; new topics cannot be added");
    }
    const TopicId id = slugify(clean);
    if (id.empty()) {
        throw InvalidRequest("topic label '" + clean + "' has no alphanumeric characters");
    }
    if (find_by_label(clean) != nullptr || contains(id)) {
        throw InvalidRequest("topic '" + clean + "' already exists");
    }
    TopicId parent_id = root();
    if (parent) {
        if (!contains(*parent)) {
            throw NotFoundError("unknown parent topic '" + *parent + "'");
        }
        if (mode_ == TaxonomyMode::flat && *parent != root()) {
            throw InvalidRequest("flat topic lists only attach to the root");
        }
        parent_id = *parent;
    }
    Taxonomy next = *this;
    next.nodes_.push_back(TopicNode{id, clean, parent_id});
    next.index_.emplace(id, next.nodes_.size() - 1);
    return next;
}

std::string Taxonomy::serialize() const
{
    std::string out;
    for (const auto& n : nodes_) {
        out += format_taxonomy_line(n);
        out += '\n';
    }
    return out;
}

TopicId slugify(std::string_view label)
{
    std::string out;
    bool pending_dash = false;
    for (const char ch : label) {
        const auto c = static_cast<unsigned char>(ch);
        const bool alnum = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || (c >= 'A' && c <= 'Z') || c >= 0x80;
        if (!alnum) {
            pending_dash = true;
            continue;
        }
        if (pending_dash && !out.empty()) {
            out += '-';
        }
        pending_dash = false;
        out += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch;
    }
    return out;
}

TopicNode parse_taxonomy_line(std::string_view line, std::size_t line_no)
{
    const auto fields = split(line, '\t');
    const auto where = " on line " + std::to_string(line_no);
    if (fields.size() != 3) {
        throw TaxonomyError("expected 3 tab-separated fields" + where);
    }
    for (const auto f : fields) {
        if (f.empty() || f != trim(f)) {
            throw TaxonomyError("empty or padded field" + where);
        }
    }
    TopicNode n{std::string(fields[0]), std::string(fields[1]), std::nullopt};
    if (fields[2] != "-") {
        n.parent = std::string(fields[2]);
    }
    if (n.parent && *n.parent == n.id) {
        throw TaxonomyError("cycle in taxonomy: " + n.id + " -> " + n.id);
    }
    return n;
}

std::string format_taxonomy_line(const TopicNode& node)
{
    return node.id + '\t' + node.label + '\t' + (node.parent ? *node.parent : std::string("-"));
}

Taxonomy parse_taxonomy(std::string_view content, TaxonomyMode mode)
{
    std::vector<TopicNode> nodes;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < content.size()) {
        auto end = content.find('\n', start);
        if (end == std::string_view::npos) {
            end = content.size();
        }
        ++line_no;
        auto line = content.substr(start, end - start);
        start = end + 1;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (trim(line).empty() || line.front() == '#') {
            continue;
        }
        nodes.push_back(parse_taxonomy_line(line, line_no));
    }
    return Taxonomy::from_nodes(mode, std::move(nodes));
}

Taxonomy load_taxonomy(const std::filesystem::path& path, TaxonomyMode mode)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw NotFoundError("cannot open taxonomy " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_taxonomy(ss.str(), mode);
}

Taxonomy flatten(const Taxonomy& t)
{
    std::vector<TopicNode> nodes = t.nodes();
    for (auto& n : nodes) {
        if (n.parent) {
            n.parent = t.root();
        }
    }
    return Taxonomy::from_nodes(TaxonomyMode::flat, std::move(nodes));
}

}  // namespace quickstep
