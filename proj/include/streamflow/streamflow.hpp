#pragma once

// Umbrella header for the whole pipeline: corpus ingest, temporal slicing,
// per-window community detection, cross-window linking, split/merge
// denoising, laminar stream extraction and the export formats.

#include "streamflow/alluvial.hpp"
#include "streamflow/denoise.hpp"
#include "streamflow/errors.hpp"
#include "streamflow/exports.hpp"
#include "streamflow/ingest.hpp"
#include "streamflow/linker.hpp"
#include "streamflow/partition.hpp"
#include "streamflow/pipeline.hpp"
#include "streamflow/rng.hpp"
#include "streamflow/slicer.hpp"
#include "streamflow/streams.hpp"
#include "streamflow/synth.hpp"
#include "streamflow/types.hpp"
