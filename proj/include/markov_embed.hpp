#pragma once

#include "markov_embed/error.hpp"
#include "markov_embed/scalar.hpp"
#include "markov_embed/alphabet.hpp"
#include "markov_embed/source.hpp"
#include "markov_embed/prefix_tree.hpp"
#include "markov_embed/sampler.hpp"
#include "markov_embed/regex.hpp"
#include "markov_embed/automata.hpp"
#include "markov_embed/transformation.hpp"
#include "markov_embed/markov_check.hpp"
#include "markov_embed/refinement.hpp"
#include "markov_embed/chain.hpp"
#include "markov_embed/analysis.hpp"
#include "markov_embed/io.hpp"
