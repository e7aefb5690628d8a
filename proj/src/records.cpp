#include "quickstep/records.hpp"

#include <cstdio>

namespace quickstep {

namespace {

std::vector<std::string_view> fields(std::string_view line, std::size_t n, std::string_view what)
{
    auto f = split(line, '\t');
    if (f.size() != n) {
        throw ParseError(std::string(what) + " record needs " + std::to_string(n) + " fields: '" + std::string(line) +
            "'");
    }
    for (const auto v : f) {
        if (v.empty()) {
            throw ParseError(std::string(what) + " record has an empty field: '" + std::string(line) + "'");
        }
    }
    return f;
}

void require_clean(std::initializer_list<std::string_view> values, std::string_view what)
{
    for (const auto v : values) {
        if (!is_clean_field(v)) {
            throw InvalidRequest(std::string(what) + " record has an empty or multi-line field");
        }
    }
}

}  // namespace

std::string_view to_string(Phase p)
{
    return p == Phase::nightly ? "nightly" : "daily";
}

Phase parse_phase(std::string_view s)
{
    if (s == "nightly") {
        return Phase::nightly;
    }
    if (s == "daily") {
        return Phase::daily;
    }
    throw ParseError("unknown phase '" + std::string(s) + "'");
}

std::string format_user(const UserAccount& r)
{
    require_clean({r.user}, "user");
    return r.user + '\t' + std::string(to_string(r.group)) + '\t' + r.created_at.str();
}

UserAccount parse_user(std::string_view line)
{
    const auto f = fields(line, 3, "user");
    return {std::string(f[0]), parse_group(f[1]), Date::parse(f[2])};
}

std::string format_browse(const BrowseRecord& r)
{
    require_clean({r.user, r.url, r.doc_id}, "browse");
    return r.at.str() + '\t' + r.user + '\t' + r.url + '\t' + r.doc_id;
}

BrowseRecord parse_browse(std::string_view line)
{
    const auto f = fields(line, 4, "browse");
    return {Timestamp::parse(f[0]), std::string(f[1]), std::string(f[2]), std::string(f[3])};
}

std::string format_document(const DocumentRecord& r)
{
    require_clean({r.doc_id, r.url}, "document");
    return r.doc_id + '\t' + r.url + '\t' + r.registered.str();
}

DocumentRecord parse_document(std::string_view line)
{
    const auto f = fields(line, 3, "document");
    return {std::string(f[0]), std::string(f[1]), Date::parse(f[2])};
}

std::string format_training(const TrainingRecord& r)
{
    require_clean({r.doc_id, r.topic}, "training");
    return r.doc_id + '\t' + r.topic + '\t' + std::string(to_string(r.source)) + '\t' + r.added_at.str();
}

TrainingRecord parse_training(std::string_view line)
{
    const auto f = fields(line, 4, "training");
    return {std::string(f[0]), std::string(f[1]), parse_example_source(f[2]), Date::parse(f[3])};
}

std::string format_cycle(const CycleRecord& r)
{
    return r.date.str() + '\t' + std::string(to_string(r.phase));
}

CycleRecord parse_cycle(std::string_view line)
{
    const auto f = fields(line, 2, "cycle");
    return {Date::parse(f[0]), parse_phase(f[1])};
}

std::string format_served(const ServedRecord& r)
{
    require_clean({r.user}, "served");
    return r.user + '\t' + r.set_date.str() + '\t' + r.at.str();
}

ServedRecord parse_served(std::string_view line)
{
    const auto f = fields(line, 3, "served");
    return {std::string(f[0]), Date::parse(f[1]), Timestamp::parse(f[2])};
}

std::string doc_id_for_url(std::string_view url)
{
    char buf[20];
    std::snprintf(buf, sizeof buf, "d%016llx", static_cast<unsigned long long>(fnv1a(url)));
    return buf;
}

}  // namespace quickstep
