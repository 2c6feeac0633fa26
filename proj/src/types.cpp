#include "mg/types.hpp"

namespace mg {

const char* to_string(ModelKind k) {
    switch (k) {
        case ModelKind::AdditiveSeparable: return "additive_separable";
        case ModelKind::Roommates: return "roommates";
        case ModelKind::General: return "general";
    }
    return "?";
}

const char* to_string(GameClass c) {
    switch (c) {
        case GameClass::ZeroSum: return "zero_sum";
        case GameClass::StrictlyCompetitive: return "strictly_competitive";
        case GameClass::Repeated: return "repeated";
        case GameClass::General: return "general";
    }
    return "?";
}

const BimatrixGame* Instance::game(int a, int b) const {
    auto it = games.find({a, b});
    return it == games.end() ? nullptr : &it->second;
}

int Instance::doctor_index(const std::string& id) const {
    for (std::size_t i = 0; i < doctors.size(); ++i)
        if (doctors[i].id == id) return static_cast<int>(i);
    return -1;
}

int Instance::hospital_index(const std::string& id) const {
    for (std::size_t i = 0; i < hospitals.size(); ++i)
        if (hospitals[i].id == id) return static_cast<int>(i);
    return -1;
}

long CycleStrategy::length() const {
    long n = 0;
    for (std::size_t i = 0; i < cycle.size(); ++i) n += repeat(i);
    return n;
}

std::vector<std::pair<int, int>> CycleStrategy::stages() const {
    std::vector<std::pair<int, int>> out;
    for (std::size_t i = 0; i < cycle.size(); ++i) out.insert(out.end(), repeat(i), cycle[i]);
    return out;
}

std::vector<int> Allocation::members(int h) const {
    std::vector<int> out;
    for (std::size_t d = 0; d < match.size(); ++d)
        if (match[d] == h) out.push_back(static_cast<int>(d));
    return out;
}

Allocation empty_allocation(const Instance& inst) {
    Allocation a;
    a.match.assign(inst.doctors.size(), -1);
    return a;
}

}  // namespace mg
