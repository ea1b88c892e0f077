#pragma once

#include "robustexp/axioms.hpp"
#include "robustexp/bar_extension.hpp"
#include "robustexp/conjugate.hpp"
#include "robustexp/consistency.hpp"
#include "robustexp/continuity.hpp"
#include "robustexp/errors.hpp"
#include "robustexp/expectation.hpp"
#include "robustexp/extension.hpp"
#include "robustexp/gauss_hermite.hpp"
#include "robustexp/gaussian.hpp"
#include "robustexp/kernel.hpp"
#include "robustexp/lp.hpp"
#include "robustexp/marginal_family.hpp"
#include "robustexp/markov_chain.hpp"
#include "robustexp/model_document.hpp"
#include "robustexp/monotone_sequence.hpp"
#include "robustexp/parallel.hpp"
#include "robustexp/product_space.hpp"
#include "robustexp/pushforward.hpp"
#include "robustexp/state_space.hpp"
#include "robustexp/subspace.hpp"
