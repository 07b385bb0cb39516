#pragma once

#include "xsr/harness/config.hpp"
#include "xsr/harness/records.hpp"

namespace xsr::harness {

// Step 1: materialize train/test CSVs for every selected dataset.
void cmd_generate(const ExperimentConfig& config);

// Step 2: grid-search every (dataset x regressor) pair with 3-fold CV and
// persist the winning configuration plus the full CV table.
void cmd_tune(const ExperimentConfig& config);

// Step 3: fit, score, and explain every (dataset x regressor x repetition)
// cell, appending JSON-lines records. Returns the number of failed cells.
int cmd_run(const ExperimentConfig& config);

// Reads the tuned parameters for a pair; an empty grid tunes trivially.
nlohmann::json tuned_params(const ExperimentConfig& config, const std::string& dataset,
                            const std::string& regressor);

}  // namespace xsr::harness
