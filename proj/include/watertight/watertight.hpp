#pragma once

#include "bezier.hpp"
#include "compose.hpp"
#include "core.hpp"
#include "intersection.hpp"
#include "mesh.hpp"
#include "model_io.hpp"
#include "pipeline.hpp"
#include "report.hpp"
#include "segmentation.hpp"
#include "stitching.hpp"
