#pragma once

#include <string>

#include "json.hpp"

#include "igw/gibbs.hpp"
#include "igw/tlmm.hpp"

namespace igw {

using json = nlohmann::json;

// CSV with header `group,y,x1`, one row per observation.
std::string format_csv(const TLMMData& data);
void write_csv(const std::string& path, const TLMMData& data);
TLMMData parse_csv(const std::string& text, Design design = Design::InterceptSlope);
TLMMData read_csv(const std::string& path, Design design = Design::InterceptSlope);

json read_json(const std::string& path);
void write_json(const std::string& path, const json& j);
void write_text(const std::string& path, const std::string& text);

json to_json(const PosteriorSummary& s);
// Rebuilds the common parameters and natural vectors of q*; fields not stored are left default.
PosteriorSummary posterior_from_json(const json& j);

json to_json(const ChainSummary& s);

// {"family": <family name>, ...fields}.
PriorSpec parse_prior(const json& j);
json prior_to_json(const PriorSpec& spec);
// Keys: sigma_beta, s_sigma, s_Sigma, lambda_nu, sigma_prior, Sigma_prior.
void apply_config(const json& j, TLMMHyper& hyper);

}  // namespace igw
