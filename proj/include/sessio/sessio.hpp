#pragma once

#include "sessio/codec.hpp"
#include "sessio/diagnostics.hpp"
#include "sessio/error.hpp"
#include "sessio/payload.hpp"
#include "sessio/protocol.hpp"
#include "sessio/runtime.hpp"
#include "sessio/session.hpp"
#include "sessio/shape.hpp"
#include "sessio/token.hpp"
#include "sessio/trace.hpp"
#include "sessio/witness.hpp"
