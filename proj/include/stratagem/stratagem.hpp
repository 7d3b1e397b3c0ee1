#pragma once

// Everything except the websocket server, which needs Boost
// (include "stratagem/net/ws_server.hpp" for that).

#include "stratagem/agents/agent.hpp"
#include "stratagem/agents/baselines.hpp"
#include "stratagem/agents/registry.hpp"
#include "stratagem/agents/search.hpp"
#include "stratagem/config.hpp"
#include "stratagem/errors.hpp"
#include "stratagem/forward_model.hpp"
#include "stratagem/log.hpp"
#include "stratagem/model.hpp"
#include "stratagem/net/protocol.hpp"
#include "stratagem/rng.hpp"
#include "stratagem/runner/arena.hpp"
#include "stratagem/runner/replay.hpp"
#include "stratagem/runner/session.hpp"
