#pragma once

#include "pavsim/service.hpp"

namespace httplib {
class Server;
}

namespace pavsim {

/// Routes every request on `server` to `service`. Cross-origin access is
/// granted to `service.config().ui_origin` only; preflights from any other
/// origin get 403.
void mount(httplib::Server& server, Service& service);

}  // namespace pavsim
