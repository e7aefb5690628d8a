#include "quickstep/http.hpp"

#include <httplib.h>

#include <json.hpp>

namespace quickstep {

using nlohmann::json;

namespace {

constexpr const char* kTokenHeader = "X-Quickstep-Token";

json to_json(const UserAccount& u)
{
    return {{"user", u.user}, {"group", to_string(u.group)}, {"created_at", u.created_at.str()}};
}

json to_json(const TopicNode& n, const Taxonomy& t)
{
    return {{"id", n.id}, {"label", n.label}, {"parent", n.parent ? json(*n.parent) : json(nullptr)},
        {"depth", t.depth(n.id)}};
}

json to_json(const FeedbackEvent& e)
{
    return {{"at", e.at.str()}, {"user", e.user}, {"kind", to_string(e.kind)}, {"topic", e.topic},
        {"doc_id", e.paper ? json(*e.paper) : json(nullptr)}, {"group", to_string(e.group)}};
}

json to_json(const CycleReport& r)
{
    json training = json::object();
    for (const auto& [g, t] : r.training) {
        training[std::string(to_string(g))] = {
            {"examples", t.examples}, {"trained", t.trained}, {"rounds_completed", t.rounds_completed}};
    }
    json out{{"phase", to_string(r.phase)}, {"as_of", r.as_of.str()}};
    if (r.phase == Phase::nightly) {
        out["training"] = training;
        out["pending"] = r.pending;
        out["classified"] = r.classified;
        out["retried"] = r.retried;
        out["browsed_events"] = r.browsed_events;
    } else {
        out["profiles"] = r.profiles;
        out["recommendations"] = r.recommendations;
    }
    return out;
}

json body_of(const httplib::Request& req)
{
    json j;
    try {
        j = json::parse(req.body);
    } catch (const json::exception&) {
        throw InvalidRequest("request body is not valid JSON");
    }
    if (!j.is_object()) {
        throw InvalidRequest("request body must be a JSON object");
    }
    return j;
}

std::string required(const json& j, const char* key)
{
    const auto it = j.find(key);
    if (it == j.end() || !it->is_string() || it->get<std::string>().empty()) {
        throw InvalidRequest(std::string("missing string field '") + key + "'");
    }
    return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& j, const char* key)
{
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        return std::nullopt;
    }
    if (!it->is_string()) {
        throw InvalidRequest(std::string("field '") + key + "' must be a string");
    }
    return it->get<std::string>();
}

void reply(httplib::Response& res, int status, const json& body)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

template <class F>
httplib::Server::Handler guarded(F f)
{
    return [f](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const InvalidRequest& e) {
            reply(res, 400, {{"error", e.what()}});
        } catch (const ParseError& e) {
            reply(res, 400, {{"error", e.what()}});
        } catch (const TaxonomyError& e) {
            reply(res, 400, {{"error", e.what()}});
        } catch (const NotFoundError& e) {
            reply(res, 404, {{"error", e.what()}});
        } catch (const FetchError& e) {
            reply(res, 422, {{"error", e.what()}});
        } catch (const PhaseOrderError& e) {
            reply(res, 409, {{"error", e.what()}});
        } catch (const NoRecommendations& e) {
            reply(res, 409, {{"error", e.what()}});
        } catch (const std::exception& e) {
            reply(res, 500, {{"error", e.what()}});
        }
    };
}

Group group_of(Service& s, const json& j)
{
    if (const auto user = optional_string(j, "user")) {
        const auto account = s.user(*user);
        if (!account) {
            throw NotFoundError("unknown user '" + *user + "'");
        }
        return account->group;
    }
    try {
        return parse_group(required(j, "group"));
    } catch (const ParseError& e) {
        throw InvalidRequest(e.what());
    }
}

}  // namespace

struct HttpServer::Impl {
    Service& service;
    std::string token;
    httplib::Server server;

    Impl(Service& s, std::string t) : service(s), token(std::move(t)) { routes(); }

    void routes()
    {
        server.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
            if (!token.empty() && req.get_header_value(kTokenHeader) != token) {
                reply(res, 401, {{"error", "missing or wrong X-Quickstep-Token"}});
                return httplib::Server::HandlerResponse::Handled;
            }
            return httplib::Server::HandlerResponse::Unhandled;
        });

        server.Post("/admin/users", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto j = body_of(req);
            Group g;
            try {
                g = parse_group(required(j, "group"));
            } catch (const ParseError& e) {
                throw InvalidRequest(e.what());
            }
            reply(res, 201, to_json(service.create_user(required(j, "user"), g)));
        }));

        server.Post("/log/browse", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto j = body_of(req);
            const auto it = j.find("entries");
            if (it == j.end() || !it->is_array()) {
                throw InvalidRequest("missing array field 'entries'");
            }
            std::vector<BrowseLogEntry> entries;
            std::vector<EntryError> malformed;
            std::vector<std::size_t> index;
            for (std::size_t i = 0; i < it->size(); ++i) {
                try {
                    const auto& e = (*it)[i];
                    if (!e.is_object()) {
                        throw InvalidRequest("entry must be an object");
                    }
                    const auto at = optional_string(e, "at");
                    entries.push_back({required(e, "user"), required(e, "url"),
                        at ? Timestamp::parse(*at) : Timestamp::now(), optional_string(e, "text")});
                    index.push_back(i);
                } catch (const Error& err) {
                    malformed.push_back({i, err.what()});
                }
            }
            auto report = service.ingest_browse_log(entries);
            json errors = json::array();
            for (auto& e : report.errors) {
                e.index = index[e.index];
            }
            report.errors.insert(report.errors.end(), malformed.begin(), malformed.end());
            std::sort(report.errors.begin(), report.errors.end(),
                [](const EntryError& a, const EntryError& b) { return a.index < b.index; });
            for (const auto& e : report.errors) {
                errors.push_back({{"index", e.index}, {"error", e.message}});
            }
            reply(res, 200, {{"accepted", report.accepted}, {"filtered", report.filtered}, {"errors", errors}});
        }));

        server.Get(R"(/recommendations/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto user = req.matches[1].str();
            const bool preview = req.has_param("preview") && req.get_param_value("preview") != "0";
            const auto served = service.serve_recommendations(user, preview);
            const auto taxonomy = service.taxonomy(served.set.group);
            json items = json::array();
            for (const auto& r : served.set.items) {
                items.push_back({{"rank", r.rank}, {"doc_id", r.doc_id}, {"url", service.document_url(r.doc_id).value_or("")},
                    {"topic", r.topic},
                    {"topic_label", taxonomy.contains(r.topic) ? taxonomy.node(r.topic).label : r.topic},
                    {"confidence", r.confidence}, {"score", r.score}});
            }
            reply(res, 200,
                {{"user", served.set.user}, {"group", to_string(served.set.group)}, {"date", served.set.date.str()},
                    {"first_view", served.first_view}, {"items", items}});
        }));

        server.Post("/feedback", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto j = body_of(req);
            const auto user = required(j, "user");
            const auto doc = required(j, "doc_id");
            const auto kind = parse_feedback_kind(required(j, "kind"));
            const auto recorded = service.submit_feedback(user, doc, kind, optional_string(j, "corrected_topic"));
            reply(res, recorded ? 201 : 200, {{"recorded", recorded}});
        }));

        server.Post("/examples", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto j = body_of(req);
            auto target = optional_string(j, "doc_id");
            if (!target) {
                target = required(j, "url");
            }
            const auto r = service.submit_example(required(j, "user"), *target, required(j, "topic"),
                optional_string(j, "text"));
            reply(res, 201, {{"doc_id", r.doc_id}, {"topic", r.topic}, {"group", to_string(r.group)},
                {"training_size", r.training_size}});
        }));

        server.Post("/topics", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto j = body_of(req);
            const auto g = group_of(service, j);
            const auto node = service.add_topic(g, required(j, "label"), optional_string(j, "parent"));
            reply(res, 201, {{"topic", to_json(node, service.taxonomy(g))}});
        }));

        server.Get("/topics", guarded([this](const httplib::Request& req, httplib::Response& res) {
            if (!req.has_param("group")) {
                throw InvalidRequest("missing query parameter 'group'");
            }
            Group g;
            try {
                g = parse_group(req.get_param_value("group"));
            } catch (const ParseError& e) {
                throw InvalidRequest(e.what());
            }
            const auto t = service.taxonomy(g);
            json topics = json::array();
            for (const auto& n : t.nodes()) {
                topics.push_back(to_json(n, t));
            }
            reply(res, 200,
                {{"group", to_string(g)}, {"mode", t.mode() == TaxonomyMode::flat ? "flat" : "hierarchical"},
                    {"root", t.root()}, {"topics", topics}});
        }));

        server.Post("/admin/run-cycle", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto j = body_of(req);
            Phase phase;
            Date as_of;
            try {
                phase = parse_phase(required(j, "phase"));
                as_of = Date::parse(required(j, "as_of"));
            } catch (const ParseError& e) {
                throw InvalidRequest(e.what());
            }
            reply(res, 200, to_json(service.run_cycle(phase, as_of)));
        }));

        server.Get("/events", guarded([this](const httplib::Request& req, httplib::Response& res) {
            json out = json::array();
            const auto user = req.has_param("user") ? req.get_param_value("user") : std::string();
            for (const auto& e : service.events()) {
                if (user.empty() || e.user == user) {
                    out.push_back(to_json(e));
                }
            }
            reply(res, 200, {{"events", out}});
        }));
    }
};

HttpServer::HttpServer(Service& service, std::string auth_token)
    : impl_(std::make_unique<Impl>(service, std::move(auth_token)))
{
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port)
{
    if (port == 0) {
        const int p = impl_->server.bind_to_any_port(host);
        if (p < 0) {
            throw Error("cannot bind " + host);
        }
        return p;
    }
    if (!impl_->server.bind_to_port(host, port)) {
        throw Error("cannot bind " + host + ":" + std::to_string(port));
    }
    return port;
}

void HttpServer::serve()
{
    impl_->server.listen_after_bind();
}

void HttpServer::stop()
{
    impl_->server.stop();
}

}  // namespace quickstep
