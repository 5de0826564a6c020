#pragma once

namespace hcopt {

enum class GroupBy { Function, Location };

} // namespace hcopt
