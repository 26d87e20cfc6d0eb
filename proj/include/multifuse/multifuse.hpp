#pragma once

#include "multifuse/assoc.hpp"
#include "multifuse/cluster.hpp"
#include "multifuse/errors.hpp"
#include "multifuse/fusion.hpp"
#include "multifuse/ingest.hpp"
#include "multifuse/io.hpp"
#include "multifuse/model.hpp"
#include "multifuse/rng.hpp"
#include "multifuse/similarity.hpp"
#include "multifuse/synth.hpp"
#include "multifuse/topics.hpp"
