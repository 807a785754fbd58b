#pragma once

// Umbrella header for the Core Sentiment Inventory library.

#include "csi/config.hpp"
#include "csi/correlation.hpp"
#include "csi/errors.hpp"
#include "csi/inventory.hpp"
#include "csi/model_client.hpp"
#include "csi/pipeline.hpp"
#include "csi/protocol.hpp"
#include "csi/rational.hpp"
#include "csi/reporting.hpp"
#include "csi/response_parser.hpp"
#include "csi/rng.hpp"
#include "csi/scoring.hpp"
#include "csi/text.hpp"
#include "csi/validity.hpp"
