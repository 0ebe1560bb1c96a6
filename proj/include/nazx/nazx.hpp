#pragma once

// Umbrella header.

#include "nazx/phase.hpp"
#include "nazx/circuit.hpp"
#include "nazx/qasm.hpp"
#include "nazx/passes.hpp"
#include "nazx/gf2.hpp"
#include "nazx/zx_diagram.hpp"
#include "nazx/oracle.hpp"
#include "nazx/ingest.hpp"
#include "nazx/gflow.hpp"
#include "nazx/cnp.hpp"
#include "nazx/simplify.hpp"
#include "nazx/extract.hpp"
#include "nazx/na_backend.hpp"
#include "nazx/pipeline.hpp"
