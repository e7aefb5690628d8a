// quickstep: command-line entry point for the recommender.

#include <CLI11.hpp>

#include <csignal>
#include <iostream>

#include "quickstep/evalkit.hpp"
#include "quickstep/http.hpp"
#include "quickstep/service.hpp"
#include "quickstep/store.hpp"

namespace fs = std::filesystem;
using namespace quickstep;

namespace {

HttpServer* g_server = nullptr;

void on_signal(int)
{
    if (g_server != nullptr) {
        g_server->stop();
    }
}

Config config_from(const std::string& path)
{
    return path.empty() ? Config{} : load_config(path);
}

std::unique_ptr<Service> open(const fs::path& data, const std::string& config_path)
{
    if (!fs::exists(data / "events.log") && !fs::exists(data / "taxonomy.flat.tsv")) {
        throw InvalidRequest(data.string() + " is not a data root; run 'quickstep init' first");
    }
    auto config = config_from(config_path);
    const auto fetch_root = config.fetch_root.empty() ? data / "incoming" : config.fetch_root;
    return std::make_unique<Service>(data, std::move(config), std::make_unique<LocalFileFetcher>(fetch_root),
        [] { return Timestamp::now(); });
}

void print_report(const CycleReport& r)
{
    std::cout << to_string(r.phase) << ' ' << r.as_of.str() << '\n';
    if (r.phase == Phase::nightly) {
        for (const auto& [g, t] : r.training) {
            std::cout << "  " << to_string(g) << ": " << t.examples << " examples, "
                      << (t.trained ? std::to_string(t.rounds_completed) + " rounds" : std::string("not trained"))
                      << '\n';
        }
        std::cout << "  pending " << r.pending << ", classified " << r.classified << ", retry " << r.retried
                  << ", browse events " << r.browsed_events << '\n';
    } else {
        std::cout << "  profiles " << r.profiles << ", recommendations " << r.recommendations << '\n';
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Quickstep research-paper recommender"};
    app.require_subcommand(1);

    std::string data;
    std::string config_path;
    std::string taxonomy_path = (fs::path(QUICKSTEP_DATA_DIR) / "taxonomy.cs.tsv").string();
    auto* init = app.add_subcommand("init", "Create a data root with flat and hierarchical taxonomies");
    init->add_option("--data", data, "Data root directory")->required();
    init->add_option("--taxonomy", taxonomy_path, "Hierarchical taxonomy TSV; the flat list is derived from it")
        ->check(CLI::ExistingFile);

    std::string user;
    std::string group;
    auto* add_user = app.add_subcommand("add-user", "Register a user in a group");
    add_user->add_option("--data", data, "Data root directory")->required();
    add_user->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    add_user->add_option("--user", user, "User id")->required();
    add_user->add_option("--group", group, "flat or ontology")->required()->check(CLI::IsMember({"flat", "ontology"}));

    std::string host = "127.0.0.1";
    int port = 8080;
    auto* serve = app.add_subcommand("serve", "Serve the JSON API");
    serve->add_option("--data", data, "Data root directory")->required();
    serve->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    serve->add_option("--host", host, "Listen address");
    serve->add_option("--port", port, "Listen port (0 picks one)")->check(CLI::Range(0, 65535));

    std::string phase;
    std::string as_of;
    auto* cycle = app.add_subcommand("run-cycle", "Run the nightly or daily phase");
    cycle->add_option("--data", data, "Data root directory")->required();
    cycle->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    cycle->add_option("--phase", phase, "nightly or daily")->required()->check(CLI::IsMember({"nightly", "daily"}));
    cycle->add_option("--as-of", as_of, "Cycle date, YYYY-MM-DD (default: today)");

    std::string until;
    std::string out;
    auto* evaluate = app.add_subcommand("evaluate", "Print metric series from the event log as TSV");
    evaluate->add_option("--data", data, "Data root directory")->required();
    evaluate->add_option("--until", until, "Last date, YYYY-MM-DD (default: today)");
    evaluate->add_option("--out", out, "Write the TSV here instead of stdout");

    SimulationConfig sim;
    std::string sim_out;
    std::string start = sim.start.str();
    auto* simulate_cmd = app.add_subcommand("simulate", "Run the synthetic two-group trial");
    simulate_cmd->add_option("--out", sim_out, "Data root to create")->required();
    simulate_cmd->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
    simulate_cmd->add_option("--days", sim.days, "Simulated days")->capture_default_str();
    simulate_cmd->add_option("--users", sim.users, "Users, split evenly between the groups")->capture_default_str();
    simulate_cmd->add_option("--papers", sim.papers, "Corpus size")->capture_default_str();
    simulate_cmd->add_option("--start", start, "First simulated day")->capture_default_str();
    simulate_cmd->add_option("--taxonomy", taxonomy_path, "Two-level taxonomy TSV")->check(CLI::ExistingFile);
    simulate_cmd->add_option("--config", config_path, "JSON service config")->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*init) {
            const auto ontology = load_taxonomy(taxonomy_path, TaxonomyMode::hierarchical);
            Service::initialize(data, flatten(ontology), ontology);
            std::cout << "initialized " << data << " with " << ontology.size() << " topics\n";
        } else if (*add_user) {
            auto service = open(data, config_path);
            const auto account = service->create_user(user, parse_group(group));
            std::cout << account.user << '\t' << to_string(account.group) << '\n';
        } else if (*serve) {
            auto service = open(data, config_path);
            HttpServer server(*service, service->config().auth_token);
            const int bound = server.bind(host, port);
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cout << "listening on http://" << host << ':' << bound << std::endl;
            server.serve();
            g_server = nullptr;
        } else if (*cycle) {
            auto service = open(data, config_path);
            const auto date = as_of.empty() ? Timestamp::now().date() : Date::parse(as_of);
            print_report(service->run_cycle(parse_phase(phase), date));
        } else if (*evaluate) {
            const auto date = until.empty() ? Timestamp::now().date() : Date::parse(until);
            const auto report = format_report(evaluate_data_root(data, date));
            if (out.empty()) {
                std::cout << report;
            } else {
                write_file_atomic(out, report);
            }
        } else if (*simulate_cmd) {
            sim.root = sim_out;
            sim.start = Date::parse(start);
            sim.taxonomy_path = taxonomy_path;
            sim.service = config_from(config_path);
            const auto result = simulate(sim);
            for (const auto& s : result.series) {
                std::cout << to_string(s.group) << '\t' << to_string(s.metric) << '\t' << format_double(final_value(s))
                          << '\n';
            }
            std::cout << "report: " << (fs::path(sim_out) / "report.tsv").string() << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "quickstep: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
