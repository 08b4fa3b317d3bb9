#pragma once

#include "topoae/core/delaunay.hpp"
#include "topoae/core/errors.hpp"
#include "topoae/core/graphs.hpp"
#include "topoae/core/kd_tree.hpp"
#include "topoae/core/point_cloud.hpp"
#include "topoae/core/predicates.hpp"
#include "topoae/core/union_find.hpp"
#include "topoae/data/datasets.hpp"
#include "topoae/diagrams/metric.hpp"
#include "topoae/diagrams/wasserstein.hpp"
#include "topoae/dr/adam.hpp"
#include "topoae/dr/autoencoder.hpp"
#include "topoae/dr/train.hpp"
#include "topoae/eval/baselines.hpp"
#include "topoae/eval/generators.hpp"
#include "topoae/eval/quality.hpp"
#include "topoae/io/csv.hpp"
#include "topoae/io/json_io.hpp"
#include "topoae/io/svg.hpp"
#include "topoae/losses/losses.hpp"
#include "topoae/ph/diagram.hpp"
#include "topoae/ph/planar.hpp"
#include "topoae/ph/rips.hpp"
#include "topoae/util/bench.hpp"
#include "topoae/util/parallel.hpp"
#include "topoae/util/verify.hpp"
