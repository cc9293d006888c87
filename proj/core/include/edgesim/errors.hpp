#pragma once

#include <stdexcept>
#include <string>

namespace edgesim {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define EDGESIM_DEFINE_ERROR(Name)   \
  struct Name : Error {              \
    using Error::Error;              \
  }

// sim-core
EDGESIM_DEFINE_ERROR(SchedulingInPast);
EDGESIM_DEFINE_ERROR(UnknownTopic);

// infra-emulator
EDGESIM_DEFINE_ERROR(InvalidFleetConfig);
EDGESIM_DEFINE_ERROR(UnknownNode);

// monitoring
EDGESIM_DEFINE_ERROR(ConflictingReport);
EDGESIM_DEFINE_ERROR(MalformedReport);
EDGESIM_DEFINE_ERROR(InsufficientHistory);
EDGESIM_DEFINE_ERROR(ModelUnavailable);

// predictor
EDGESIM_DEFINE_ERROR(WindowTooShort);
EDGESIM_DEFINE_ERROR(EmptySequence);
EDGESIM_DEFINE_ERROR(DimensionMismatch);
EDGESIM_DEFINE_ERROR(EmptyBatch);
EDGESIM_DEFINE_ERROR(EmptyDataset);
EDGESIM_DEFINE_ERROR(InvalidHyper);
EDGESIM_DEFINE_ERROR(WrongWindowLength);
EDGESIM_DEFINE_ERROR(NodeOrderMismatch);
EDGESIM_DEFINE_ERROR(CorruptModelFile);
EDGESIM_DEFINE_ERROR(VersionMismatch);

// decision-engine
EDGESIM_DEFINE_ERROR(NodeNotEligible);
EDGESIM_DEFINE_ERROR(NoFeasibleNode);
EDGESIM_DEFINE_ERROR(DestinationLost);

// harness
EDGESIM_DEFINE_ERROR(InvalidConfig);
EDGESIM_DEFINE_ERROR(MisalignedSeries);

#undef EDGESIM_DEFINE_ERROR

}  // namespace edgesim
