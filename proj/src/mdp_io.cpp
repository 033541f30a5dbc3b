#include "rfx/mdp_io.hpp"

#include <fstream>

#include <json.hpp>

namespace rfx {

namespace {

using nlohmann::json;

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw IoError("cannot parse " + path + ": " + e.what());
  }
  return doc;
}

void write_json(const json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << doc.dump(1, '\t') << '\n';
  if (!out) throw IoError("write failed: " + path);
}

void check_schema(const json& doc, const std::string& path) {
  if (!doc.contains("schema_version") || doc["schema_version"].get<int>() != kSchemaVersion)
    throw std::invalid_argument("unsupported schema version in " + path);
}

}  // namespace

void save_mdp(const LinearMixtureMdp& mdp, const std::string& path) {
  const int S = mdp.num_states(), A = mdp.num_actions(), d = mdp.dim();
  json features = json::array();
  for (int s = 0; s < S; ++s) {
    json by_action = json::array();
    for (int a = 0; a < A; ++a) {
      json by_next = json::array();
      for (int s2 = 0; s2 < S; ++s2) {
        json vec = json::array();
        for (int i = 0; i < d; ++i) vec.push_back(mdp.feature(s, a, s2, i));
        by_next.push_back(std::move(vec));
      }
      by_action.push_back(std::move(by_next));
    }
    features.push_back(std::move(by_action));
  }
  json doc{{"schema_version", kSchemaVersion},
           {"S", S},
           {"A", A},
           {"H", mdp.horizon()},
           {"d", d},
           {"B", mdp.param_bound()},
           {"mu", std::vector<double>(mdp.init_dist().data(), mdp.init_dist().data() + S)},
           {"theta_star",
            std::vector<double>(mdp.theta_star().data(), mdp.theta_star().data() + d)},
           {"features", std::move(features)}};
  write_json(doc, path);
}

LinearMixtureMdp load_mdp(const std::string& path) {
  json doc = read_json(path);
  check_schema(doc, path);
  try {
    const int S = doc.at("S").get<int>();
    const int A = doc.at("A").get<int>();
    const int H = doc.at("H").get<int>();
    const int d = doc.at("d").get<int>();
    const double B = doc.at("B").get<double>();
    Vector mu(S), theta(d);
    const auto& mu_arr = doc.at("mu");
    const auto& th_arr = doc.at("theta_star");
    if (static_cast<int>(mu_arr.size()) != S || static_cast<int>(th_arr.size()) != d)
      throw std::invalid_argument("mdp file: mu/theta length mismatch in " + path);
    for (int s = 0; s < S; ++s) mu[s] = mu_arr[s].get<double>();
    for (int i = 0; i < d; ++i) theta[i] = th_arr[i].get<double>();

    const auto& feats = doc.at("features");
    if (static_cast<int>(feats.size()) != S)
      throw std::invalid_argument("mdp file: features shape mismatch in " + path);
    std::vector<Matrix> maps(static_cast<std::size_t>(S) * A, Matrix::Zero(d, S));
    for (int s = 0; s < S; ++s) {
      if (static_cast<int>(feats[s].size()) != A)
        throw std::invalid_argument("mdp file: features shape mismatch in " + path);
      for (int a = 0; a < A; ++a) {
        if (static_cast<int>(feats[s][a].size()) != S)
          throw std::invalid_argument("mdp file: features shape mismatch in " + path);
        for (int s2 = 0; s2 < S; ++s2) {
          if (static_cast<int>(feats[s][a][s2].size()) != d)
            throw std::invalid_argument("mdp file: features shape mismatch in " + path);
          for (int i = 0; i < d; ++i)
            maps[s * A + a](i, s2) = feats[s][a][s2][i].get<double>();
        }
      }
    }
    return LinearMixtureMdp(S, A, H, d, B, std::move(maps), std::move(theta), std::move(mu));
  } catch (const json::exception& e) {
    throw std::invalid_argument("mdp file " + path + ": " + e.what());
  }
}

void save_reward(const RewardFunction& reward, const std::string& path) {
  json values = json::array();
  for (int h = 0; h < reward.horizon; ++h) {
    json by_state = json::array();
    for (int s = 0; s < reward.num_states; ++s) {
      json row = json::array();
      for (int a = 0; a < reward.num_actions; ++a) row.push_back(reward.at(h, s, a));
      by_state.push_back(std::move(row));
    }
    values.push_back(std::move(by_state));
  }
  json doc{{"schema_version", kSchemaVersion},
           {"H", reward.horizon},
           {"S", reward.num_states},
           {"A", reward.num_actions},
           {"values", std::move(values)}};
  write_json(doc, path);
}

RewardFunction load_reward(const std::string& path) {
  json doc = read_json(path);
  check_schema(doc, path);
  try {
    const int H = doc.at("H").get<int>();
    const int S = doc.at("S").get<int>();
    const int A = doc.at("A").get<int>();
    RewardFunction r = RewardFunction::zeros(H, S, A);
    const auto& values = doc.at("values");
    if (static_cast<int>(values.size()) != H)
      throw std::invalid_argument("reward file: shape mismatch in " + path);
    for (int h = 0; h < H; ++h)
      for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) r.at(h, s, a) = values[h][s][a].get<double>();
    if (!r.in_unit_range(1e-12))
      throw std::invalid_argument("reward file: entries must lie in [0,1] in " + path);
    return r;
  } catch (const json::exception& e) {
    throw std::invalid_argument("reward file " + path + ": " + e.what());
  }
}

void save_policy(const Policy& policy, const std::string& path) {
  json doc{{"schema_version", kSchemaVersion},
           {"H", policy.horizon},
           {"S", policy.num_states},
           {"actions", policy.actions}};
  write_json(doc, path);
}

Policy load_policy(const std::string& path) {
  json doc = read_json(path);
  check_schema(doc, path);
  try {
    Policy p;
    p.horizon = doc.at("H").get<int>();
    p.num_states = doc.at("S").get<int>();
    p.actions = doc.at("actions").get<std::vector<std::vector<int>>>();
    if (static_cast<int>(p.actions.size()) != p.horizon)
      throw std::invalid_argument("policy file: shape mismatch in " + path);
    for (const auto& row : p.actions)
      if (static_cast<int>(row.size()) != p.num_states)
        throw std::invalid_argument("policy file: shape mismatch in " + path);
    return p;
  } catch (const json::exception& e) {
    throw std::invalid_argument("policy file " + path + ": " + e.what());
  }
}

void save_planner_input(const PlannerInput& state, const std::string& path) {
  const int d = static_cast<int>(state.theta.size());
  json sigma = json::array();
  for (int i = 0; i < d; ++i) {
    json row = json::array();
    for (int j = 0; j < d; ++j) row.push_back(state.sigma(i, j));
    sigma.push_back(std::move(row));
  }
  json doc{{"schema_version", kSchemaVersion},
           {"algorithm", state.algorithm},
           {"d", d},
           {"K", state.episodes},
           {"lambda", state.lambda},
           {"beta", state.beta},
           {"theta", std::vector<double>(state.theta.data(), state.theta.data() + d)},
           {"sigma", std::move(sigma)}};
  write_json(doc, path);
}

PlannerInput load_planner_input(const std::string& path) {
  json doc = read_json(path);
  check_schema(doc, path);
  try {
    PlannerInput state;
    state.algorithm = doc.at("algorithm").get<std::string>();
    const int d = doc.at("d").get<int>();
    state.episodes = doc.at("K").get<long long>();
    state.lambda = doc.at("lambda").get<double>();
    state.beta = doc.at("beta").get<double>();
    state.theta.resize(d);
    state.sigma.resize(d, d);
    const auto& th = doc.at("theta");
    const auto& sg = doc.at("sigma");
    if (static_cast<int>(th.size()) != d || static_cast<int>(sg.size()) != d)
      throw std::invalid_argument("planner input file: shape mismatch in " + path);
    for (int i = 0; i < d; ++i) {
      state.theta[i] = th[i].get<double>();
      for (int j = 0; j < d; ++j) state.sigma(i, j) = sg[i][j].get<double>();
    }
    return state;
  } catch (const json::exception& e) {
    throw std::invalid_argument("planner input file " + path + ": " + e.what());
  }
}

}  // namespace rfx
