#pragma once

// Subcommands of the driver. Each writes its artifacts below
// config.output_dir and returns a process exit code.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "penudge/cli/config.hpp"
#include "penudge/cli/output.hpp"
#include "penudge/diagnostics.hpp"

namespace penudge::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitNumerical = 2,
  kExitCheckFailed = 3,
};

enum class CheckKind { Observation, Coercivity, Gates };

struct RunContext {
  bool quiet = false;
  std::ostream* log = nullptr;  // defaults to std::cout
};

/// Reference spin-up from the seed state over config.t_spin.
SpinUpResult spin_up_reference(const ExperimentConfig& c);

struct TwinOutcome {
  double mu = 0.0;
  ObservationOp J;
  double delta = 0.0;
  ForcingMode mode = ForcingMode::Exact;
  TwinRecord record;
  std::optional<DecayFit> fit;  // on err_H1
  std::string fit_error;
  std::optional<PlateauEstimate> plateau;  // on err_H1
  AxiomConstants axioms;
  GateConstants constants;
  GateReport gates;
  double budget_max_abs = 0.0;
};

TwinOutcome twin_experiment(const ExperimentConfig& c, const SpinUpResult& ref, double mu,
                            const ObservationOp& J, ForcingMode mode);

Json twin_summary(const ExperimentConfig& c, const TwinOutcome& o);

int cmd_run_reference(const ExperimentConfig& c, const RunContext& ctx = {});
int cmd_twin(const ExperimentConfig& c, const RunContext& ctx = {});
int cmd_sweep(const ExperimentConfig& c, const RunContext& ctx = {});
int cmd_check(const ExperimentConfig& c, CheckKind which, const RunContext& ctx = {});

/// Runs f and maps exceptions to exit codes, printing the message to err.
int guarded(const std::function<int()>& f, std::ostream& err);

}  // namespace penudge::cli
