#pragma once

// Routing defense against data-poisoning attacks: best-response
// routing under Gaussian attack hypotheses, clustering of attack types
// by their best-response flows, lexicographic sensor allocation over
// subnetworks and likelihood-weighted routing after sensing.

#include "flowsense/allocate.hpp"
#include "flowsense/attack.hpp"
#include "flowsense/cluster.hpp"
#include "flowsense/cost.hpp"
#include "flowsense/errors.hpp"
#include "flowsense/network.hpp"
#include "flowsense/partition.hpp"
#include "flowsense/pipeline.hpp"
#include "flowsense/posterior.hpp"
#include "flowsense/routes.hpp"
#include "flowsense/rng.hpp"
#include "flowsense/serialize.hpp"
#include "flowsense/solver.hpp"
#include "flowsense/tntp.hpp"
