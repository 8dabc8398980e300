#pragma once

#include "seqplan/scenario.hpp"
#include "seqplan/sequence.hpp"
#include "seqplan/scenario_io.hpp"
#include "seqplan/obstacle_field.hpp"
#include "seqplan/spacetime_planner.hpp"
#include "seqplan/rng.hpp"
#include "seqplan/sequence_search.hpp"
#include "seqplan/sequence_evaluator.hpp"
#include "seqplan/plan_checker.hpp"
#include "seqplan/optimizer.hpp"
#include "seqplan/run_report.hpp"
