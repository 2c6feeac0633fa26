#pragma once

#include <string>

#include <json.hpp>

#include "mg/types.hpp"

namespace mg {

struct LoadOptions {
    std::size_t max_general_doctors = 16;
};

Instance load_instance(const std::string& text, const LoadOptions& opt = {});
Instance load_instance_file(const std::string& path, const LoadOptions& opt = {});
nlohmann::json instance_to_json(const Instance& inst);
std::string serialize_instance(const Instance& inst);

Allocation load_allocation(const Instance& inst, const std::string& text);
nlohmann::json allocation_to_json(const Instance& inst, const Allocation& alloc);
std::string serialize_allocation(const Instance& inst, const Allocation& alloc);

nlohmann::json to_json(const Rational& q);
nlohmann::json to_json(const Vec& v);
nlohmann::json to_json(const Matrix& m);
Rational rational_from_json(const nlohmann::json& j);
Vec vec_from_json(const nlohmann::json& j);
Matrix matrix_from_json(const nlohmann::json& j);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Checks that the game respects its class tag; throws InputError.
void validate_game(const BimatrixGame& g, const std::string& where);

}  // namespace mg
