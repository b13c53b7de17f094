#include "orules/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace orules::scenario {

const char* version_key(Version v) {
    switch (v) {
        case Version::ApparatusOnly: return "apparatus_only";
        case Version::ApparatusObserver: return "apparatus_observer";
        case Version::CatV1: return "cat_v1";
        case Version::CatV1Observer: return "cat_v1_observer";
        case Version::CatV2: return "cat_v2";
        case Version::CatV2Observer: return "cat_v2_observer";
        case Version::CatV2NaturalWake: return "cat_v2_natural_wake";
    }
    return "?";
}

std::optional<Version> version_from_key(const std::string& key) {
    for (Version v :
         {Version::ApparatusOnly, Version::ApparatusObserver, Version::CatV1,
          Version::CatV1Observer, Version::CatV2, Version::CatV2Observer,
          Version::CatV2NaturalWake}) {
        if (key == version_key(v)) return v;
    }
    return std::nullopt;
}

bool version_has_cat(Version v) {
    return v != Version::ApparatusOnly && v != Version::ApparatusObserver;
}

bool version_has_observer(Version v) {
    return v == Version::ApparatusObserver || v == Version::CatV1Observer ||
           v == Version::CatV2Observer;
}

bool version_has_indicator(Version v) {
    return v == Version::ApparatusOnly || v == Version::ApparatusObserver;
}

bool version_has_clock(Version v) { return v == Version::CatV2NaturalWake; }

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::Look: return "look";
        case EventKind::Observe: return "observe";
        case EventKind::Cutoff: return "cutoff";
        case EventKind::Ring: return "ring";
    }
    return "?";
}

std::string Scenario::cat_agent() const {
    for (const auto& a : agents)
        if (a.role == AgentRole::Cat) return a.id;
    return {};
}

std::string Scenario::observer_agent() const {
    for (const auto& a : agents)
        if (a.role == AgentRole::Observer) return a.id;
    return {};
}

namespace {

using Kind = ScenarioError::Kind;

struct RawEntry {
    std::string value;
    int line;
    int column;
};

struct RawFile {
    std::map<std::string, RawEntry> top;
    std::map<std::string, RawEntry> params;
    std::map<std::string, RawEntry> events;
    std::vector<std::pair<std::string, RawEntry>> agents;  // order preserved
};

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, e - b + 1);
}

RawFile scan(const std::string& text) {
    RawFile raw;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    enum class Section { Top, Params, Events, Agents } section = Section::Top;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::string body = trim(line);
        if (body.empty()) continue;
        int col = static_cast<int>(line.find_first_not_of(" \t")) + 1;
        if (body.front() == '[') {
            if (body.back() != ']')
                throw ScenarioError(Kind::Syntax, lineno, col, "unterminated section header");
            std::string name = trim(body.substr(1, body.size() - 2));
            if (name == "params")
                section = Section::Params;
            else if (name == "events")
                section = Section::Events;
            else if (name == "agents")
                section = Section::Agents;
            else
                throw ScenarioError(Kind::UnknownKey, lineno, col, "unknown section [" + name + "]");
            continue;
        }
        auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ScenarioError(Kind::Syntax, lineno, col, "expected 'key = value'");
        std::string key = trim(body.substr(0, eq));
        std::string value = trim(body.substr(eq + 1));
        if (key.empty())
            throw ScenarioError(Kind::Syntax, lineno, col, "empty key");
        if (value.empty())
            throw ScenarioError(Kind::Syntax, lineno, col, "empty value for '" + key + "'");
        RawEntry entry{value, lineno, col};
        auto put = [&](std::map<std::string, RawEntry>& dst) {
            if (!dst.emplace(key, entry).second)
                throw ScenarioError(Kind::Syntax, lineno, col, "duplicate key '" + key + "'");
        };
        switch (section) {
            case Section::Top: put(raw.top); break;
            case Section::Params: put(raw.params); break;
            case Section::Events: put(raw.events); break;
            case Section::Agents: raw.agents.emplace_back(key, entry); break;
        }
    }
    return raw;
}

double parse_number(const std::string& key, const RawEntry& e) {
    const char* begin = e.value.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw ScenarioError(Kind::Syntax, e.line, e.column,
                            "'" + key + "' expects a number, got '" + e.value + "'");
    return v;
}

double parse_positive(const std::string& key, const RawEntry& e) {
    double v = parse_number(key, e);
    if (!(v > 0.0))
        throw ScenarioError(Kind::Syntax, e.line, e.column, "'" + key + "' must be positive");
    return v;
}

void reject_unknown(const std::map<std::string, RawEntry>& got,
                    std::initializer_list<const char*> allowed, const char* where) {
    for (const auto& [key, entry] : got) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok)
            throw ScenarioError(Kind::UnknownKey, entry.line, entry.column,
                                "unknown key '" + key + "' in " + where);
    }
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    RawFile raw = scan(text);

    reject_unknown(raw.top, {"version", "name"}, "the top section");
    auto ver_it = raw.top.find("version");
    if (ver_it == raw.top.end())
        throw ScenarioError(Kind::MissingRequired, 1, 1, "missing 'version'");
    auto version = version_from_key(ver_it->second.value);
    if (!version)
        throw ScenarioError(Kind::Syntax, ver_it->second.line, ver_it->second.column,
                            "unknown version '" + ver_it->second.value + "'");

    Scenario sc;
    sc.version = *version;
    sc.name = raw.top.count("name") ? raw.top.at("name").value : version_key(sc.version);

    reject_unknown(raw.params,
                   {"half_life", "transit_time", "alpha_bins", "kappa", "dt", "pulse_width",
                    "time_unit"},
                   "[params]");
    auto require_param = [&](const char* key) -> const RawEntry& {
        auto it = raw.params.find(key);
        if (it == raw.params.end())
            throw ScenarioError(Kind::MissingRequired, 0, 0,
                                std::string("missing '") + key + "' in [params]");
        return it->second;
    };
    double unit = raw.params.count("time_unit")
                      ? parse_positive("time_unit", raw.params.at("time_unit"))
                      : 1.0;
    auto& p = sc.params;
    p.half_life = unit * parse_positive("half_life", require_param("half_life"));
    p.transit_time = unit * parse_positive("transit_time", require_param("transit_time"));
    if (raw.params.count("alpha_bins")) {
        double v = parse_positive("alpha_bins", raw.params.at("alpha_bins"));
        if (v != std::floor(v) || v < 2)
            throw ScenarioError(Kind::Syntax, raw.params.at("alpha_bins").line,
                                raw.params.at("alpha_bins").column,
                                "'alpha_bins' must be an integer >= 2");
        p.alpha_bins = static_cast<int>(v);
    }
    if (raw.params.count("kappa")) p.kappa = parse_positive("kappa", raw.params.at("kappa")) / unit;
    if (raw.params.count("dt")) p.dt = unit * parse_positive("dt", raw.params.at("dt"));
    if (raw.params.count("pulse_width")) {
        double v = parse_positive("pulse_width", raw.params.at("pulse_width"));
        if (v != std::floor(v))
            throw ScenarioError(Kind::Syntax, raw.params.at("pulse_width").line,
                                raw.params.at("pulse_width").column,
                                "'pulse_width' must be an integer");
        p.pulse_width = static_cast<int>(v);
    }
    p.time_unit = 1.0;  // folded into the values above

    if (p.dt > 0.0 && p.dt > p.bin_time() * (1.0 + 1e-12)) {
        const auto& e = raw.params.at("dt");
        throw ScenarioError(Kind::OrderViolation, e.line, e.column,
                            "dt must not exceed transit_time / alpha_bins = " +
                                format_number(p.bin_time()));
    }
    if ((p.phys_rate() + p.decay_rate()) * p.step() > 0.1)
        throw ScenarioError(Kind::OrderViolation, 0, 0,
                            "step too coarse: (kappa + decay rate) * dt exceeds 0.1");

    reject_unknown(raw.events, {"t_look", "t_ob", "t_ff"}, "[events]");
    auto event_time = [&](const char* key) -> std::optional<double> {
        auto it = raw.events.find(key);
        if (it == raw.events.end()) return std::nullopt;
        return unit * parse_positive(key, it->second);
    };
    sc.t_look = event_time("t_look");
    sc.t_ob = event_time("t_ob");
    sc.t_ff = event_time("t_ff");

    if (version_has_observer(sc.version)) {
        if (!sc.t_look)
            throw ScenarioError(Kind::MissingRequired, 0, 0, "observer versions need 't_look'");
        if (!sc.t_ob)
            throw ScenarioError(Kind::MissingRequired, 0, 0, "observer versions need 't_ob'");
        if (*sc.t_ob < *sc.t_look) {
            const auto& e = raw.events.at("t_ob");
            throw ScenarioError(Kind::OrderViolation, e.line, e.column,
                                "t_ob must not precede t_look");
        }
    } else {
        for (const char* key : {"t_look", "t_ob"})
            if (raw.events.count(key))
                throw ScenarioError(Kind::UnknownKey, raw.events.at(key).line,
                                    raw.events.at(key).column,
                                    std::string("'") + key + "' does not apply to version " +
                                        version_key(sc.version));
    }
    if (version_has_clock(sc.version)) {
        if (!sc.t_ff)
            throw ScenarioError(Kind::MissingRequired, 0, 0, "natural wake-up needs 't_ff'");
    } else if (raw.events.count("t_ff")) {
        throw ScenarioError(Kind::UnknownKey, raw.events.at("t_ff").line,
                            raw.events.at("t_ff").column,
                            std::string("'t_ff' does not apply to version ") +
                                version_key(sc.version));
    }

    for (const auto& [id, entry] : raw.agents) {
        AgentRole role;
        if (entry.value == "cat")
            role = AgentRole::Cat;
        else if (entry.value == "observer")
            role = AgentRole::Observer;
        else
            throw ScenarioError(Kind::Syntax, entry.line, entry.column,
                                "agent role must be 'cat' or 'observer', got '" + entry.value +
                                    "'");
        bool wanted = (role == AgentRole::Cat) ? version_has_cat(sc.version)
                                               : version_has_observer(sc.version);
        if (!wanted)
            throw ScenarioError(Kind::UnknownKey, entry.line, entry.column,
                                std::string("version ") + version_key(sc.version) + " has no " +
                                    entry.value + " agent");
        for (const auto& a : sc.agents) {
            if (a.id == id)
                throw ScenarioError(Kind::Syntax, entry.line, entry.column,
                                    "duplicate agent '" + id + "'");
            if (a.role == role)
                throw ScenarioError(Kind::Syntax, entry.line, entry.column,
                                    std::string("more than one ") + entry.value + " agent");
        }
        sc.agents.push_back({id, role});
    }
    if (version_has_cat(sc.version) && sc.cat_agent().empty())
        throw ScenarioError(Kind::MissingRequired, 0, 0, "missing cat agent in [agents]");
    if (version_has_observer(sc.version) && sc.observer_agent().empty())
        throw ScenarioError(Kind::MissingRequired, 0, 0, "missing observer agent in [agents]");

    // Assemble the schedule: one Cutoff at the half-life, always.
    auto& ev = sc.schedule.events;
    if (sc.t_look) ev.push_back({*sc.t_look, EventKind::Look, sc.observer_agent()});
    if (sc.t_ob) ev.push_back({*sc.t_ob, EventKind::Observe, sc.observer_agent()});
    ev.push_back({p.half_life, EventKind::Cutoff, ""});
    if (sc.t_ff) ev.push_back({*sc.t_ff, EventKind::Ring, ""});
    std::stable_sort(ev.begin(), ev.end(),
                     [](const auto& a, const auto& b) { return a.time < b.time; });
    for (std::size_t i = 1; i < ev.size(); ++i) {
        if (ev[i].time == ev[i - 1].time)
            throw ScenarioError(Kind::OrderViolation, 0, 0,
                                std::string("events '") + to_string(ev[i - 1].kind) + "' and '" +
                                    to_string(ev[i].kind) + "' collide at the same time");
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ScenarioError(Kind::MissingRequired, 0, 0, "cannot read scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& sc) {
    std::ostringstream out;
    out << "version = " << version_key(sc.version) << "\n";
    out << "name = " << sc.name << "\n";
    out << "\n[params]\n";
    const auto& p = sc.params;
    out << "half_life = " << format_number(p.half_life) << "\n";
    out << "transit_time = " << format_number(p.transit_time) << "\n";
    out << "alpha_bins = " << p.alpha_bins << "\n";
    if (p.kappa > 0.0) out << "kappa = " << format_number(p.kappa) << "\n";
    if (p.dt > 0.0) out << "dt = " << format_number(p.dt) << "\n";
    if (p.pulse_width != 1) out << "pulse_width = " << p.pulse_width << "\n";
    if (sc.t_look || sc.t_ob || sc.t_ff) {
        out << "\n[events]\n";
        if (sc.t_look) out << "t_look = " << format_number(*sc.t_look) << "\n";
        if (sc.t_ob) out << "t_ob = " << format_number(*sc.t_ob) << "\n";
        if (sc.t_ff) out << "t_ff = " << format_number(*sc.t_ff) << "\n";
    }
    if (!sc.agents.empty()) {
        out << "\n[agents]\n";
        for (const auto& a : sc.agents)
            out << a.id << " = " << (a.role == AgentRole::Cat ? "cat" : "observer") << "\n";
    }
    return out.str();
}

StateGraph build_initial_state(const Scenario& sc) {
    std::vector<SubsystemFactor> factors;
    factors.push_back(DetectorFactor{0});
    factors.push_back(DeviceFactor{});
    if (version_has_indicator(sc.version)) factors.push_back(IndicatorFactor{Indicator::i0});
    if (version_has_cat(sc.version)) {
        bool v1 = sc.version == Version::CatV1 || sc.version == Version::CatV1Observer;
        factors.push_back(BrainFactor{sc.cat_agent(), v1 ? "C0" : "U",
                                      v1 ? BrainStatus::Conscious : BrainStatus::Unconscious});
    }
    if (version_has_observer(sc.version))
        factors.push_back(BrainFactor{sc.observer_agent(), "", BrainStatus::External});
    if (version_has_clock(sc.version)) factors.push_back(ClockFactor{false});

    StateGraph g;
    g.insert(make_component(std::move(factors), 1.0));
    return g;
}

namespace {

bool is_v1(Version v) { return v == Version::CatV1 || v == Version::CatV1Observer; }

void apply_rule2(Component& c) {
    for (auto* b : c.brains())
        if (is_active(b->status)) b->status = BrainStatus::Ready;
}

}  // namespace

std::string observer_awareness(const Scenario& sc, const Component& comp) {
    if (version_has_indicator(sc.version)) {
        const IndicatorFactor* ind = comp.indicator();
        bool done = ind && (ind->level == Indicator::i1 || ind->level == Indicator::I1);
        return done ? "B1" : "B0";
    }
    const BrainFactor* cat = comp.brain(sc.cat_agent());
    if (is_v1(sc.version)) {
        if (cat && cat->status == BrainStatus::Unconscious) return "BU";
        return "B0";
    }
    // Version II families: awareness of the alarm stage and the cat.
    if (cat && cat->status == BrainStatus::Unconscious) {
        const DetectorFactor* det = comp.detector();
        return (det && det->value == 1) ? "BaU" : "B0U";
    }
    return "BfC";
}

Component decay_target(const Scenario&, const Component& source) {
    Component t = source;
    t.id = 0;
    t.weight = 0.0;
    t.detector()->value = 1;
    apply_rule2(t);  // the decay branch is discontinuous with its source
    if (DeviceFactor* dev = t.device()) {
        dev->bins.clear();
        dev->shift_phase = 0.0;
        // Rule 4 pins a ready component, so its device stays parked.
        dev->pos = contains_ready(t) ? DevicePos::AtStart : DevicePos::Running;
    }
    return t;
}

Component completion_target(const Scenario& sc, const Component& source, bool alternatives_exist) {
    Component t = source;
    t.id = 0;
    t.weight = 0.0;
    if (DeviceFactor* dev = t.device()) {
        dev->pos = DevicePos::Done;
        dev->bins.clear();
        dev->shift_phase = 0.0;
    }
    if (IndicatorFactor* ind = t.indicator()) {
        if (ind->level == Indicator::i0) ind->level = Indicator::i1;
        if (ind->level == Indicator::I0) ind->level = Indicator::I1;
    }
    if (BrainFactor* cat = t.brain(sc.cat_agent()); cat && !sc.cat_agent().empty()) {
        if (is_v1(sc.version)) {
            // The completed device has put the cat to sleep.
            cat->awareness = "U";
            cat->status = BrainStatus::Unconscious;
        } else {
            // The completed alarm wakes the cat: a ready state while other
            // components coexist, a realized conscious one when the
            // completing component is the lone survivor.
            cat->awareness = "C";
            if (cat->status != BrainStatus::Conscious)
                cat->status = alternatives_exist ? BrainStatus::Ready : BrainStatus::Conscious;
        }
    }
    std::string obs = sc.observer_agent();
    if (!obs.empty()) {
        if (BrainFactor* b = t.brain(obs); b && b->status == BrainStatus::Conscious)
            b->awareness = observer_awareness(sc, t);
    }
    return t;
}

Component resolution_twin(const Scenario& sc, const Component& source, const std::string& agent,
                          bool wake) {
    Component t = source;
    t.id = 0;
    t.weight = 0.0;
    BrainFactor* b = t.brain(agent);
    if (b) {
        b->status = BrainStatus::Ready;
        b->awareness = wake ? "C" : observer_awareness(sc, source);
    }
    apply_rule2(t);
    if (DeviceFactor* dev = t.device(); dev && dev->pos == DevicePos::Running) {
        dev->bins.clear();  // the twin accumulates its own image of the pulse
        dev->shift_phase = 0.0;
    }
    return t;
}

}  // namespace orules::scenario
