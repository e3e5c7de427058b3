#pragma once

#include "lemsynth/sexpr.hpp"
#include "lemsynth/logic.hpp"
#include "lemsynth/problem.hpp"
#include "lemsynth/model.hpp"
#include "lemsynth/natproofs.hpp"
#include "lemsynth/induction.hpp"
#include "lemsynth/subprocess.hpp"
#include "lemsynth/smt.hpp"
#include "lemsynth/modelkit.hpp"
#include "lemsynth/synth.hpp"
#include "lemsynth/sygus.hpp"
#include "lemsynth/engine.hpp"
