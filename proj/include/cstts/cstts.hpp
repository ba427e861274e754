#pragma once

#include "cstts/audio.hpp"
#include "cstts/cache.hpp"
#include "cstts/config.hpp"
#include "cstts/engine.hpp"
#include "cstts/error.hpp"
#include "cstts/http_engine.hpp"
#include "cstts/language.hpp"
#include "cstts/pipeline.hpp"
#include "cstts/plan.hpp"
#include "cstts/prosody.hpp"
#include "cstts/script.hpp"
#include "cstts/service.hpp"
#include "cstts/ssml.hpp"
#include "cstts/synth.hpp"
#include "cstts/unicode.hpp"
#include "cstts/voice.hpp"
#include "cstts/wav.hpp"
