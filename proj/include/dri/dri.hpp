#ifndef DRI_DRI_HPP
#define DRI_DRI_HPP

#include "dri/classify.hpp"
#include "dri/compare.hpp"
#include "dri/export.hpp"
#include "dri/index_core.hpp"
#include "dri/ingest.hpp"
#include "dri/run_config.hpp"
#include "dri/schema.hpp"

#endif  // DRI_DRI_HPP
