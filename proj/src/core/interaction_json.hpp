#pragma once

#include "interaction.hpp"
#include "json.hpp"

namespace ppg {

nlohmann::json prompt_to_value(const Prompt& p);
Prompt prompt_from_value(const nlohmann::json& j);
nlohmann::json answer_to_value(const Answer& a);
Answer answer_from_value(const nlohmann::json& j);

}  // namespace ppg
