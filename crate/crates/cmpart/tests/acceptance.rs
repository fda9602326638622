// Acceptance suite lands after the pipeline is built.
