#include "orules/state.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace orules {

bool is_active(BrainStatus s) {
    return s == BrainStatus::Ready || s == BrainStatus::Conscious;
}

const char* to_string(BrainStatus s) {
    switch (s) {
        case BrainStatus::External: return "external";
        case BrainStatus::Brink: return "brink";
        case BrainStatus::Ready: return "ready";
        case BrainStatus::Conscious: return "conscious";
        case BrainStatus::Unconscious: return "unconscious";
    }
    return "?";
}

const char* to_string(Indicator v) {
    switch (v) {
        case Indicator::i0: return "i0";
        case Indicator::i1: return "i1";
        case Indicator::I0: return "I0";
        case Indicator::I1: return "I1";
    }
    return "?";
}

double DeviceFactor::bin_mass() const {
    return std::accumulate(bins.begin(), bins.end(), 0.0);
}

namespace {

template <typename T, typename Self>
auto* find_factor(Self& c) {
    for (auto& f : c.factors)
        if (auto* p = std::get_if<T>(&f)) return p;
    using Ptr = decltype(std::get_if<T>(&c.factors.front()));
    return Ptr{nullptr};
}

}  // namespace

const DetectorFactor* Component::detector() const { return find_factor<DetectorFactor>(*this); }
DetectorFactor* Component::detector() { return find_factor<DetectorFactor>(*this); }
const DeviceFactor* Component::device() const { return find_factor<DeviceFactor>(*this); }
DeviceFactor* Component::device() { return find_factor<DeviceFactor>(*this); }
const IndicatorFactor* Component::indicator() const { return find_factor<IndicatorFactor>(*this); }
IndicatorFactor* Component::indicator() { return find_factor<IndicatorFactor>(*this); }
const ClockFactor* Component::clock() const { return find_factor<ClockFactor>(*this); }
ClockFactor* Component::clock() { return find_factor<ClockFactor>(*this); }

const BrainFactor* Component::brain(const std::string& agent) const {
    for (const auto& f : factors)
        if (const auto* b = std::get_if<BrainFactor>(&f); b && b->agent == agent) return b;
    return nullptr;
}

BrainFactor* Component::brain(const std::string& agent) {
    for (auto& f : factors)
        if (auto* b = std::get_if<BrainFactor>(&f); b && b->agent == agent) return b;
    return nullptr;
}

std::vector<const BrainFactor*> Component::brains() const {
    std::vector<const BrainFactor*> out;
    for (const auto& f : factors)
        if (const auto* b = std::get_if<BrainFactor>(&f)) out.push_back(b);
    return out;
}

std::vector<BrainFactor*> Component::brains() {
    std::vector<BrainFactor*> out;
    for (auto& f : factors)
        if (auto* b = std::get_if<BrainFactor>(&f)) out.push_back(b);
    return out;
}

std::string Component::label() const {
    std::string out;
    auto append = [&out](const std::string& piece) {
        if (!out.empty()) out += ' ';
        out += piece;
    };
    for (const auto& f : factors) {
        if (const auto* d = std::get_if<DetectorFactor>(&f)) {
            append(d->value == 0 ? "d0" : "d1");
        } else if (const auto* dev = std::get_if<DeviceFactor>(&f)) {
            switch (dev->pos) {
                case DevicePos::AtStart: append("M(a0)"); break;
                case DevicePos::Running: append("M(a)"); break;
                case DevicePos::Done: append("M(af)"); break;
            }
        } else if (const auto* i = std::get_if<IndicatorFactor>(&f)) {
            append(to_string(i->level));
        } else if (const auto* b = std::get_if<BrainFactor>(&f)) {
            std::string tok = b->agent + "=";
            switch (b->status) {
                case BrainStatus::External: tok += "X"; break;
                case BrainStatus::Brink: tok += "Bb"; break;
                case BrainStatus::Ready: tok += "_" + b->awareness; break;
                case BrainStatus::Conscious: tok += b->awareness; break;
                case BrainStatus::Unconscious: tok += b->awareness; break;
            }
            append(tok);
        } else if (const auto* n = std::get_if<ClockFactor>(&f)) {
            append(n->rung ? "N=rung" : "N");
        }
    }
    return out;
}

bool Component::label_equal(const Component& o) const {
    if (factors.size() != o.factors.size()) return false;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        const auto& a = factors[i];
        const auto& b = o.factors[i];
        if (a.index() != b.index()) return false;
        bool same = std::visit(
            [&](const auto& fa) {
                using T = std::decay_t<decltype(fa)>;
                const auto& fb = std::get<T>(b);
                if constexpr (std::is_same_v<T, DeviceFactor>)
                    return fa.label_equal(fb);
                else
                    return fa == fb;
            },
            a);
        if (!same) return false;
    }
    return true;
}

Component make_component(std::vector<SubsystemFactor> factors, double weight) {
    if (!(weight >= 0.0 && weight <= 1.0))
        throw BadWeightError("component weight " + std::to_string(weight) + " outside [0,1]");
    if (factors.empty()) throw BadWeightError("component needs at least one factor");
    std::set<std::string> agents;
    for (const auto& f : factors) {
        if (const auto* b = std::get_if<BrainFactor>(&f)) {
            if (!agents.insert(b->agent).second)
                throw DuplicateAgentError("two brain factors for agent '" + b->agent + "'");
        }
    }
    Component c;
    c.factors = std::move(factors);
    c.weight = weight;
    return c;
}

bool contains_ready(const Component& c) {
    for (const auto* b : c.brains())
        if (b->status == BrainStatus::Ready) return true;
    return false;
}

bool contains_conscious(const Component& c) {
    for (const auto* b : c.brains())
        if (b->status == BrainStatus::Conscious) return true;
    return false;
}

bool is_discontinuous(const Component& a, const Component& b) {
    return !a.label_equal(b);
}

ComponentId StateGraph::insert(Component c) {
    c.id = next_id_++;
    if (c.created_at == 0.0) c.created_at = time;
    components.push_back(std::move(c));
    return components.back().id;
}

Component* StateGraph::find(ComponentId id) {
    for (auto& c : components)
        if (c.id == id) return &c;
    return nullptr;
}

const Component* StateGraph::find(ComponentId id) const {
    for (const auto& c : components)
        if (c.id == id) return &c;
    return nullptr;
}

Component* StateGraph::find_label_match(const Component& like) {
    for (auto& c : components)
        if (c.label_equal(like)) return &c;
    return nullptr;
}

void StateGraph::erase(ComponentId id) {
    std::erase_if(components, [id](const Component& c) { return c.id == id; });
}

double StateGraph::total_modulus() const {
    double s = 0.0;
    for (const auto& c : components) s += c.weight;
    return s;
}

double StateGraph::nonready_modulus() const {
    double s = 0.0;
    for (const auto& c : components)
        if (!contains_ready(c)) s += c.weight;
    return s;
}

}  // namespace orules
