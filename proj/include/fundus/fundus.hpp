#pragma once

// Everything except image file I/O, which needs OpenCV: include
// fundus/pipeline/image_io.hpp or fundus/pipeline/crop_dir.hpp for that.

#include "fundus/error.hpp"
#include "fundus/imaging/color.hpp"
#include "fundus/imaging/components.hpp"
#include "fundus/imaging/field.hpp"
#include "fundus/imaging/integral.hpp"
#include "fundus/imaging/raster.hpp"
#include "fundus/imaging/resize.hpp"
#include "fundus/saliency/contrast.hpp"
#include "fundus/saliency/segmentation.hpp"
#include "fundus/descriptors/hog.hpp"
#include "fundus/encoding/codebook.hpp"
#include "fundus/encoding/kmeans.hpp"
#include "fundus/encoding/llc.hpp"
#include "fundus/topicmodel/plsa.hpp"
#include "fundus/topicmodel/plsa_io.hpp"
#include "fundus/classifier/fuzzy_knn.hpp"
#include "fundus/classifier/validation.hpp"
#include "fundus/vasculature/distance.hpp"
#include "fundus/vasculature/macula.hpp"
#include "fundus/vasculature/main_course.hpp"
#include "fundus/vasculature/parabola.hpp"
#include "fundus/vasculature/skeleton.hpp"
#include "fundus/vasculature/vessels.hpp"
#include "fundus/pipeline/annotations.hpp"
#include "fundus/pipeline/bench.hpp"
#include "fundus/pipeline/config.hpp"
#include "fundus/pipeline/detect.hpp"
#include "fundus/pipeline/evaluate.hpp"
#include "fundus/pipeline/report.hpp"
#include "fundus/pipeline/sweep.hpp"
#include "fundus/pipeline/synthetic.hpp"
#include "fundus/pipeline/train.hpp"
#include "fundus/pipeline/training_set.hpp"
