#pragma once
/// @file reconeval.hpp
/// @brief Convenience header pulling in the whole library.

#include "reconeval/core/camera.hpp"
#include "reconeval/core/error.hpp"
#include "reconeval/core/image.hpp"
#include "reconeval/core/parallel.hpp"
#include "reconeval/core/scene.hpp"
#include "reconeval/io/byte_stream.hpp"
#include "reconeval/io/dense_model.hpp"
#include "reconeval/io/manifest.hpp"
#include "reconeval/io/model_bundle.hpp"
#include "reconeval/io/ply.hpp"
#include "reconeval/io/png.hpp"
#include "reconeval/io/sparse_model.hpp"
#include "reconeval/metrics/difps.hpp"
#include "reconeval/metrics/feature_store.hpp"
#include "reconeval/metrics/lpips.hpp"
#include "reconeval/metrics/report.hpp"
#include "reconeval/metrics/scene_metrics.hpp"
#include "reconeval/pipeline/commands.hpp"
#include "reconeval/pipeline/run_support.hpp"
#include "reconeval/preprocess/colmap_filter.hpp"
#include "reconeval/preprocess/normalize.hpp"
#include "reconeval/preprocess/region_mask.hpp"
#include "reconeval/reproject/render.hpp"
#include "reconeval/reproject/reprojection.hpp"
#include "reconeval/synth/synth.hpp"
