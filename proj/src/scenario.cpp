#include "cnc/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cnc/error.hpp"
#include "cnc/regularizer.hpp"

namespace cnc {

using nlohmann::json;

std::string_view to_string(ViewMode mode) {
    return mode == ViewMode::Oracle ? "oracle" : "distributed";
}

namespace {

[[noreturn]] void bad(const std::string& what) {
    throw Error(ErrorCode::InvalidScenario, what);
}

template <class T>
T get(const json& j, const char* key, std::string_view where) {
    if (!j.contains(key)) bad(std::string(where) + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        bad(std::string(where) + ": field '" + key + "': " + e.what());
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, std::string_view where) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    return get<T>(j, key, where);
}

template <class T>
std::optional<T> get_opt(const json& j, const char* key, std::string_view where) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return get<T>(j, key, where);
}

template <class IdT>
IdT get_id(const json& j, const char* key, std::string_view where) {
    return IdT(get<std::uint32_t>(j, key, where));
}

ResourceSpec parse_resources(const json& j, std::string_view where) {
    return {get_or<double>(j, "cpu", 0.0, where), get_or<double>(j, "gpu", 0.0, where),
            get_or<double>(j, "memory_gb", 0.0, where)};
}

json resources_json(const ResourceSpec& r) {
    return {{"cpu", r.cpu}, {"gpu", r.gpu}, {"memory_gb", r.memory_gb}};
}

Level parse_level_field(const json& j, std::string_view where) {
    const auto text = get_or<std::string>(j, "level", "performance", where);
    auto level = parse_level(text);
    if (!level) bad(std::string(where) + ": unknown level '" + text + "'");
    return *level;
}

RawRequest parse_request(const json& j) {
    const std::string where = "request";
    RawRequest r;
    r.id = get_id<RequestId>(j, "id", where);
    r.level = parse_level_field(j, where);
    if (auto s = get_opt<std::uint32_t>(j, "service", where)) r.service = ServiceId(*s);
    if (j.contains("resources") && !j["resources"].is_null()) r.resources = parse_resources(j["resources"], where);
    r.task_count = get_or<std::uint32_t>(j, "task_count", 1, where);
    r.deadline_s = get_opt<double>(j, "deadline_s", where);
    r.usage_duration_s = get_opt<double>(j, "usage_duration_s", where);
    r.ingress = get_id<RouterId>(j, "ingress", where);
    r.submit_time_s = get_or<double>(j, "submit_time_s", 0.0, where);
    return r;
}

json request_json(const RawRequest& r) {
    json j = {{"id", r.id.value}, {"level", std::string(to_string(r.level))}, {"task_count", r.task_count},
              {"ingress", r.ingress.value}, {"submit_time_s", r.submit_time_s}};
    if (r.service) j["service"] = r.service->value;
    if (r.resources) j["resources"] = resources_json(*r.resources);
    if (r.deadline_s) j["deadline_s"] = *r.deadline_s;
    if (r.usage_duration_s) j["usage_duration_s"] = *r.usage_duration_s;
    return j;
}

const std::set<std::string> kTopLevelKeys = {
    "routers", "links", "cnodes", "tiers", "services", "requests", "workload", "background_load", "initial_queues",
    "rng_seed", "scheme", "view_mode", "cnc_enabled", "cnc_period_s", "cnc_packet_bytes", "bootstrap_views",
    "default_deadline_s", "split_k", "sim_until_s", "max_time_s", "name", "description"};

}  // namespace

Scenario parse_scenario(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        bad(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) bad("scenario must be a JSON object");
    for (const auto& [key, value] : doc.items())
        if (!kTopLevelKeys.count(key)) bad("unknown top-level field '" + key + "'");

    Scenario s;
    auto& t = s.topology;
    for (const auto& r : doc.value("routers", json::array())) {
        if (r.is_object())
            t.routers.push_back(get_id<RouterId>(r, "id", "router"));
        else
            t.routers.emplace_back(r.get<std::uint32_t>());
    }
    for (const auto& l : doc.value("links", json::array())) {
        Link link;
        link.id = get_id<LinkId>(l, "id", "link");
        link.a = get_id<RouterId>(l, "a", "link");
        link.b = get_id<RouterId>(l, "b", "link");
        link.bandwidth_bps = get_or<double>(l, "bandwidth_bps", 1e9, "link");
        link.prop_delay_s = get_or<double>(l, "prop_delay_s", 0.0, "link");
        t.links.push_back(link);
    }
    if (doc.contains("tiers")) {
        const auto& tiers = doc["tiers"];
        for (auto kind : {TierKind::Weak, TierKind::Medium, TierKind::Strong}) {
            const std::string name(to_string(kind));
            if (!tiers.contains(name)) continue;
            t.tiers[kind].rate_wups = get<double>(tiers[name], "rate_wups", "tier " + name);
            t.tiers[kind].price_per_wu = get<double>(tiers[name], "price_per_wu", "tier " + name);
        }
    }
    for (const auto& j : doc.value("services", json::array())) {
        ServiceDescriptor d;
        d.id = get_id<ServiceId>(j, "id", "service");
        d.name = get_or<std::string>(j, "name", "", "service");
        d.input_bytes_per_task = get<double>(j, "input_bytes_per_task", "service");
        d.output_bytes_per_task = get<double>(j, "output_bytes_per_task", "service");
        d.work_wu_per_task = get<double>(j, "work_wu_per_task", "service");
        if (j.contains("resource_class") && !j["resource_class"].is_null())
            d.resource_class = parse_resources(j["resource_class"], "service");
        t.services.push_back(std::move(d));
    }
    for (const auto& j : doc.value("cnodes", json::array())) {
        Cnode c;
        c.id = get_id<CnodeId>(j, "id", "cnode");
        c.attached_router = get_id<RouterId>(j, "router", "cnode");
        const auto tier = get<std::string>(j, "tier", "cnode");
        auto kind = parse_tier(tier);
        if (!kind) bad("cnode: unknown tier '" + tier + "'");
        c.tier = *kind;
        for (const auto& d : j.value("deployments", json::array()))
            c.deployments[get_id<ServiceId>(d, "service", "deployment")] = get_or<int>(d, "replicas", 1, "deployment");
        for (const auto& b : j.value("backlog_wu", json::array()))
            c.backlog_wu[get_id<ServiceId>(b, "service", "backlog")] = get<double>(b, "wu", "backlog");
        t.cnodes.push_back(std::move(c));
    }
    for (const auto& j : doc.value("requests", json::array())) s.requests.push_back(parse_request(j));

    if (doc.contains("workload") && !doc["workload"].is_null()) {
        const auto& j = doc["workload"];
        const std::string where = "workload";
        WorkloadSpec w;
        w.rate_per_s = get<double>(j, "rate_per_s", where);
        w.start_s = get_or<double>(j, "start_s", 0.0, where);
        w.end_s = get<double>(j, "end_s", where);
        w.service = get_id<ServiceId>(j, "service", where);
        w.tasks_min = get_or<std::uint32_t>(j, "tasks_min", 1, where);
        w.tasks_max = get_or<std::uint32_t>(j, "tasks_max", w.tasks_min, where);
        for (const auto& r : j.value("ingress", json::array())) w.ingress.emplace_back(r.get<std::uint32_t>());
        w.level = parse_level_field(j, where);
        w.deadline_s = get_opt<double>(j, "deadline_s", where);
        w.usage_duration_s = get_opt<double>(j, "usage_duration_s", where);
        if (j.contains("resources") && !j["resources"].is_null()) w.resources = parse_resources(j["resources"], where);
        s.workload = std::move(w);
    }
    if (doc.contains("background_load") && !doc["background_load"].is_null()) {
        const auto& j = doc["background_load"];
        const std::string where = "background_load";
        s.background.utilization = get_or<double>(j, "utilization", 0.0, where);
        s.background.burst_bytes = get_or<double>(j, "burst_bytes", 12.5e6, where);
        for (const auto& l : j.value("links", json::array())) s.background.links.emplace_back(l.get<std::uint32_t>());
        s.background.start_s = get_or<double>(j, "start_s", 0.0, where);
        s.background.end_s = get_opt<double>(j, "end_s", where);
    }
    for (const auto& j : doc.value("initial_queues", json::array()))
        s.initial_queues.push_back({get_id<LinkId>(j, "link", "initial_queue"),
                                    get_id<RouterId>(j, "from", "initial_queue"),
                                    get<double>(j, "bytes", "initial_queue")});

    s.rng_seed = get_or<std::uint64_t>(doc, "rng_seed", 1, "scenario");
    auto& cfg = s.settings;
    const auto scheme = get_or<std::string>(doc, "scheme", "cnc", "scenario");
    if (auto parsed = parse_scheme(scheme))
        cfg.scheme = *parsed;
    else
        bad("unknown scheme '" + scheme + "'");
    const auto mode = get_or<std::string>(doc, "view_mode", "distributed", "scenario");
    if (mode == "distributed")
        cfg.view_mode = ViewMode::Distributed;
    else if (mode == "oracle")
        cfg.view_mode = ViewMode::Oracle;
    else
        bad("unknown view_mode '" + mode + "'");
    cfg.cnc_enabled = get_or<bool>(doc, "cnc_enabled", cfg.cnc_enabled, "scenario");
    cfg.cnc_period_s = get_or<double>(doc, "cnc_period_s", cfg.cnc_period_s, "scenario");
    cfg.cnc_packet_bytes = get_or<double>(doc, "cnc_packet_bytes", cfg.cnc_packet_bytes, "scenario");
    cfg.bootstrap_views = get_or<bool>(doc, "bootstrap_views", cfg.bootstrap_views, "scenario");
    cfg.default_deadline_s = get_or<double>(doc, "default_deadline_s", cfg.default_deadline_s, "scenario");
    cfg.split_k = get_or<std::size_t>(doc, "split_k", cfg.split_k, "scenario");
    cfg.sim_until_s = get_or<double>(doc, "sim_until_s", cfg.sim_until_s, "scenario");
    cfg.max_time_s = get_or<double>(doc, "max_time_s", cfg.max_time_s, "scenario");
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) bad("cannot open scenario file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string scenario_to_json(const Scenario& s) {
    json doc;
    const auto& t = s.topology;
    doc["routers"] = json::array();
    for (auto r : t.routers) doc["routers"].push_back(r.value);
    doc["links"] = json::array();
    for (const auto& l : t.links)
        doc["links"].push_back({{"id", l.id.value}, {"a", l.a.value}, {"b", l.b.value},
                                {"bandwidth_bps", l.bandwidth_bps}, {"prop_delay_s", l.prop_delay_s}});
    for (auto kind : {TierKind::Weak, TierKind::Medium, TierKind::Strong})
        doc["tiers"][std::string(to_string(kind))] = {{"rate_wups", t.tiers[kind].rate_wups},
                                                      {"price_per_wu", t.tiers[kind].price_per_wu}};
    doc["services"] = json::array();
    for (const auto& d : t.services) {
        json j = {{"id", d.id.value}, {"name", d.name}, {"input_bytes_per_task", d.input_bytes_per_task},
                  {"output_bytes_per_task", d.output_bytes_per_task}, {"work_wu_per_task", d.work_wu_per_task}};
        if (d.resource_class) j["resource_class"] = resources_json(*d.resource_class);
        doc["services"].push_back(std::move(j));
    }
    doc["cnodes"] = json::array();
    for (const auto& c : t.cnodes) {
        json j = {{"id", c.id.value}, {"router", c.attached_router.value}, {"tier", std::string(to_string(c.tier))}};
        j["deployments"] = json::array();
        for (const auto& [svc, n] : c.deployments) j["deployments"].push_back({{"service", svc.value}, {"replicas", n}});
        if (!c.backlog_wu.empty()) {
            j["backlog_wu"] = json::array();
            for (const auto& [svc, wu] : c.backlog_wu) j["backlog_wu"].push_back({{"service", svc.value}, {"wu", wu}});
        }
        doc["cnodes"].push_back(std::move(j));
    }
    doc["requests"] = json::array();
    for (const auto& r : s.requests) doc["requests"].push_back(request_json(r));
    if (s.workload) {
        const auto& w = *s.workload;
        json j = {{"rate_per_s", w.rate_per_s}, {"start_s", w.start_s}, {"end_s", w.end_s},
                  {"service", w.service.value}, {"tasks_min", w.tasks_min}, {"tasks_max", w.tasks_max},
                  {"level", std::string(to_string(w.level))}};
        j["ingress"] = json::array();
        for (auto r : w.ingress) j["ingress"].push_back(r.value);
        if (w.deadline_s) j["deadline_s"] = *w.deadline_s;
        if (w.usage_duration_s) j["usage_duration_s"] = *w.usage_duration_s;
        if (w.resources) j["resources"] = resources_json(*w.resources);
        doc["workload"] = std::move(j);
    }
    {
        const auto& b = s.background;
        json j = {{"utilization", b.utilization}, {"burst_bytes", b.burst_bytes}, {"start_s", b.start_s}};
        j["links"] = json::array();
        for (auto l : b.links) j["links"].push_back(l.value);
        if (b.end_s) j["end_s"] = *b.end_s;
        doc["background_load"] = std::move(j);
    }
    if (!s.initial_queues.empty()) {
        doc["initial_queues"] = json::array();
        for (const auto& q : s.initial_queues)
            doc["initial_queues"].push_back({{"link", q.link.value}, {"from", q.from.value}, {"bytes", q.bytes}});
    }
    const auto& cfg = s.settings;
    doc["rng_seed"] = s.rng_seed;
    doc["scheme"] = std::string(to_string(cfg.scheme));
    doc["view_mode"] = std::string(to_string(cfg.view_mode));
    doc["cnc_enabled"] = cfg.cnc_enabled;
    doc["cnc_period_s"] = cfg.cnc_period_s;
    doc["cnc_packet_bytes"] = cfg.cnc_packet_bytes;
    doc["bootstrap_views"] = cfg.bootstrap_views;
    doc["default_deadline_s"] = cfg.default_deadline_s;
    doc["split_k"] = cfg.split_k;
    doc["sim_until_s"] = cfg.sim_until_s;
    doc["max_time_s"] = cfg.max_time_s;
    return doc.dump(2);
}

std::vector<Diagnostic> validate_scenario(const Scenario& s) {
    auto out = validate_topology(s.topology);
    auto fail = [&](std::string code, auto&&... parts) {
        std::ostringstream os;
        (os << ... << parts);
        out.push_back({std::move(code), os.str()});
    };
    const auto& t = s.topology;
    const std::set<RouterId> routers(t.routers.begin(), t.routers.end());
    std::set<ServiceId> services;
    for (const auto& d : t.services) services.insert(d.id);
    std::set<LinkId> links;
    for (const auto& l : t.links) links.insert(l.id);

    std::set<RequestId> ids;
    for (const auto& r : s.requests) {
        if (!ids.insert(r.id).second) fail("duplicate-id", "request id ", r.id, " appears more than once");
        if (!routers.count(r.ingress)) fail("unknown-router", "request ", r.id, " enters at unknown router ", r.ingress);
        if (r.task_count < 1) fail("invalid-request", "request ", r.id, " needs at least one task");
        if (!(r.submit_time_s >= 0.0)) fail("invalid-request", "request ", r.id, " has a negative submit time");
        if (r.service && !services.count(*r.service))
            fail("unknown-service", "request ", r.id, " names unknown service ", *r.service);
        try {
            regularize(r, t.services, s.settings.default_deadline_s);
        } catch (const Error& e) {
            fail("invalid-request", e.what());
        }
    }

    if (s.workload) {
        const auto& w = *s.workload;
        if (!(w.rate_per_s >= 0.0)) fail("invalid-workload", "arrival rate must be non-negative");
        if (!(w.end_s >= w.start_s)) fail("invalid-workload", "end_s must not precede start_s");
        if (w.tasks_min < 1 || w.tasks_max < w.tasks_min) fail("invalid-workload", "task range is empty");
        if (w.ingress.empty()) fail("invalid-workload", "no ingress routers");
        for (auto r : w.ingress)
            if (!routers.count(r)) fail("unknown-router", "workload ingress ", r, " is not a router");
        if (w.level != Level::Resource && !services.count(w.service))
            fail("unknown-service", "workload names unknown service ", w.service);
        if (w.level == Level::Performance && !w.deadline_s)
            fail("invalid-workload", "performance workload needs deadline_s");
        if (w.level == Level::Resource && (!w.resources || !w.usage_duration_s))
            fail("invalid-workload", "resource workload needs resources and usage_duration_s");
    }

    const auto& b = s.background;
    if (!(b.utilization >= 0.0 && b.utilization < 1.0))
        fail("invalid-load", "background utilization must lie in [0, 1)");
    if (!(b.burst_bytes > 0.0)) fail("invalid-load", "burst_bytes must be positive");
    for (auto l : b.links)
        if (!links.count(l)) fail("unknown-link", "background load names unknown link ", l);

    for (const auto& q : s.initial_queues) {
        if (!links.count(q.link)) {
            fail("unknown-link", "initial queue names unknown link ", q.link);
            continue;
        }
        const auto& l = *std::find_if(t.links.begin(), t.links.end(), [&](const Link& x) { return x.id == q.link; });
        if (q.from != l.a && q.from != l.b)
            fail("unknown-router", "initial queue on link ", q.link, " leaves from non-endpoint ", q.from);
        if (!(q.bytes >= 0.0)) fail("invalid-load", "initial queue on link ", q.link, " is negative");
    }

    const auto& cfg = s.settings;
    if (!(cfg.cnc_period_s > 0.0)) fail("invalid-setting", "cnc_period_s must be positive");
    if (!(cfg.cnc_packet_bytes > 0.0)) fail("invalid-setting", "cnc_packet_bytes must be positive");
    if (!(cfg.default_deadline_s > 0.0)) fail("invalid-setting", "default_deadline_s must be positive");
    if (cfg.split_k < 1) fail("invalid-setting", "split_k must be at least 1");
    if (!(cfg.max_time_s > 0.0)) fail("invalid-setting", "max_time_s must be positive");
    return out;
}

}  // namespace cnc
