#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mg/types.hpp"

namespace mg {

// Contract sets are sorted vectors of contract indices.
using ContractSet = std::vector<int>;

struct Contract {
    std::string id;
    int doctor = -1;
    int hospital = -1;
};

struct HospitalPreference {
    enum class Kind { Additive, Table, Choice } kind = Kind::Additive;
    int quota = 1;
    std::map<int, Rational> weight;         // Additive: per contract, empty set worth 0
    std::map<ContractSet, Rational> table;  // Table: unlisted non-empty sets are unacceptable
    // Choice: primitive choice function, keyed by the offered subset of this
    // hospital's contracts; unlisted subsets choose nothing.
    std::map<ContractSet, ContractSet> choice;
};

struct ContractModel {
    std::vector<std::string> doctors;
    std::vector<std::string> hospitals;
    std::vector<Contract> contracts;
    std::vector<std::map<int, Rational>> doctor_utility;  // unlisted contracts are unacceptable
    std::vector<Rational> doctor_null;                    // utility of staying unmatched
    std::vector<HospitalPreference> hospital;

    std::vector<int> of_hospital(int h) const;
    std::vector<int> of_doctor(int d) const;
};

struct ScanCapExceeded : std::runtime_error {
    explicit ScanCapExceeded(const std::string& what) : std::runtime_error("ScanCapExceeded: " + what) {}
};

// Best acceptable contract of d in `offered`, or nullopt (stay unmatched).
// Ties go to the smaller contract id; a tie with the null utility keeps d unmatched.
std::optional<int> choice_doctor(const ContractModel& m, int d, const ContractSet& offered);

// Best subset of h's contracts in `offered` with at most one contract per
// doctor (and at most quota contracts in the additive case). Ties go to the
// lexicographically smallest list of contract ids.
ContractSet choice_hospital(const ContractModel& m, int h, const ContractSet& offered);

struct DaContractsResult {
    ContractSet accepted;
    ContractSet rejected;
    long proposals = 0;
};
DaContractsResult run_da_contracts(const ContractModel& m);

// x outside Y with x = C_d(Y + x) and x in C_h(Y + x).
std::optional<int> find_pairwise_block(const ContractModel& m, const ContractSet& y);
// Every doctor and hospital keeps exactly its part of Y.
bool individually_rational(const ContractModel& m, const ContractSet& y);

struct SubstitutesWitness {
    ContractSet base;  // X'
    int rejected;      // x, rejected from X'
    int added;         // x', after which x is chosen
};
std::optional<SubstitutesWitness> check_substitutability(const ContractModel& m, int h, std::size_t cap = 12);

struct IrcWitness {
    ContractSet base;  // Y
    int added;         // z, rejected but changing the choice
};
std::optional<IrcWitness> check_irc(const ContractModel& m, int h, std::size_t cap = 12);

struct HmVerdict {
    bool stable = true;
    bool individually_rational = true;
    int hospital = -1;  // blocking hospital
    ContractSet blocking;
};
// Exhaustive over X'' within each hospital's contracts.
HmVerdict check_hm_stability(const ContractModel& m, const ContractSet& y, std::size_t cap = 12);

struct ContractAudit {
    std::vector<std::optional<SubstitutesWitness>> substitutes;  // per hospital
    std::vector<std::optional<IrcWitness>> irc;
    std::optional<int> pairwise_block;
    HmVerdict hm;
};
ContractAudit audit_contracts(const ContractModel& m, const ContractSet& y, std::size_t cap = 12);

// Contracts (d, h, x, y) for every grid point x of d's simplex and y of h's
// simplex (mesh 1/k). Doctor utility xAy, null utility the doctor IRP; additive
// hospital weights xMy minus the seat baseline, quota as in the instance.
struct GridContracts {
    ContractModel model;
    std::vector<std::pair<int, int>> couple;  // per contract
    std::vector<Profile> profile;
};
GridContracts contracts_from_game(const Instance& inst, int k, const std::optional<Rational>& baseline = std::nullopt);
Allocation allocation_from_contracts(const Instance& inst, const GridContracts& g, const ContractSet& y);

// Matching game whose strategies are the agents' contracts: both sides get the
// contract's utility when they name the same contract and -1 otherwise.
// Additive hospitals only.
Instance game_from_contracts(const ContractModel& m);

struct ContractGenConfig {
    int doctors = 3;
    int hospitals = 2;
    int contracts = 8;
    int max_quota = 2;
    // Chance in percent that a hospital gets a random subset table instead of
    // additive weights; tables often break substitutability.
    int table_percent = 50;
    std::uint64_t seed = 1;
};
ContractModel generate_contract_model(const ContractGenConfig& cfg);

ContractModel load_contract_model(const nlohmann::json& j);
nlohmann::json contract_model_to_json(const ContractModel& m);
nlohmann::json contract_set_to_json(const ContractModel& m, const ContractSet& y);

}  // namespace mg
