#pragma once

namespace hiprl {

// Canonical planning domain shipped with the project. data/domain.pddl holds
// the same bytes; a test keeps the two in sync.
extern const char* const kDomainText;

// Goal block for "is there a mug in the room?": found one, or every
// receptacle that could hold one was checked and everything is closed again.
// Class-specific goals are built programmatically; this is the reference
// rendering the builders are tested against.
extern const char* const kMugExistenceGoalText;

}  // namespace hiprl
