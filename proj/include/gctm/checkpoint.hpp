#pragma once

#include <string>

#include "gctm/baselines.hpp"
#include "gctm/model.hpp"

namespace gctm {

// Versioned binary container. Either a full GCTM state (all tensors, the
// snapshot, rho, Adam moments, t) or a baseline's Dirichlet lambda.
void save_checkpoint(const GctmState& state, const std::string& path);
GctmState load_checkpoint(const std::string& path);

void save_baseline_checkpoint(const DirichletGlobal& global, std::int64_t t,
                              const std::string& path);
DirichletGlobal load_baseline_checkpoint(const std::string& path, std::int64_t* t = nullptr);

// Kind probe without loading the tensors. Returns "gctm" or "dirichlet".
std::string checkpoint_kind(const std::string& path);

}  // namespace gctm
