#include "hiprl/domain_text.hpp"

namespace hiprl {

const char* const kDomainText = R"PDDL((define (domain qa_vsp_task)
  (:requirements
    :adl
  )
  (:types
    agent
    location
    receptacle
    object
    rtype
    otype
  )

  (:predicates
    (atLocation ?a - agent ?l - location)
    (receptacleAtLocation ?r - receptacle ?l - location)
    (objectAtLocation ?o - object ?l - location)
    (openable ?r - receptacle)
    (opened ?r - receptacle)
    (inReceptacle ?o - object ?r - receptacle)
    (checked ?r - receptacle)
    (receptacleType ?r - receptacle ?t - rtype)
    (objectType ?o - object ?t - otype)
    (canContain ?t - rtype ?o - otype)
    (holds ?a - agent ?o - object)
    (holdsAny ?a - agent)
    (full ?r - receptacle)
  )

  (:functions
    (distance ?from ?to)
    (totalCost)
  )

  ;; agent goes to receptacle
  (:action GotoLocation
    :parameters (?a - agent ?lStart - location ?lEnd - location)
    :precondition (atLocation ?a ?lStart)
    :effect (and
      (atLocation ?a ?lEnd)
      (not (atLocation ?a ?lStart))
      (forall (?r - receptacle)
        (when (and (receptacleAtLocation ?r ?lEnd)
                   (or (not (openable ?r)) (opened ?r)))
          (checked ?r)
        )
      )
      (increase (totalCost) (distance ?lStart ?lEnd))
    )
  )

  ;; agent opens receptacle
  (:action OpenObject
    :parameters (?a - agent ?l - location ?r - receptacle)
    :precondition (and
      (atLocation ?a ?l)
      (receptacleAtLocation ?r ?l)
      (openable ?r)
      (forall (?re - receptacle)
        (not (opened ?re)))
    )
    :effect (and
      (opened ?r)
      (checked ?r)
      (increase (totalCost) 1)
    )
  )

  ;; agent closes receptacle
  (:action CloseObject
    :parameters (?a - agent ?l - location ?r - receptacle)
    :precondition (and
      (atLocation ?a ?l)
      (receptacleAtLocation ?r ?l)
      (openable ?r)
      (opened ?r)
    )
    :effect (and
      (not (opened ?r))
      (increase (totalCost) 1)
    )
  )

  ;; agent picks up object
  (:action PickupObject
    :parameters (?a - agent ?l - location ?o - object ?r - receptacle)
    :precondition (and
      (atLocation ?a ?l)
      (objectAtLocation ?o ?l)
      (or (not (openable ?r)) (opened ?r))
      (inReceptacle ?o ?r)
      (not (holdsAny ?a))
    )
    :effect (and
      (not (inReceptacle ?o ?r))
      (holds ?a ?o)
      (holdsAny ?a)
      (increase (totalCost) 1)
    )
  )

  ;; agent puts down object
  (:action PutObject
    :parameters (?a - agent ?l - location ?ot - otype ?o - object ?r - receptacle)
    :precondition (and
      (atLocation ?a ?l)
      (receptacleAtLocation ?r ?l)
      (or (not (openable ?r)) (opened ?r))
      (not (full ?r))
      (objectType ?o ?ot)
      (holds ?a ?o)
    )
    :effect (and
      (inReceptacle ?o ?r)
      (full ?r)
      (not (holds ?a ?o))
      (not (holdsAny ?a))
      (increase (totalCost) 1)
    )
  )
)
)PDDL";

const char* const kMugExistenceGoalText = R"PDDL((:goal
  (or
    (exists (?o - object)
      (objectType ?o MugType))
    (and
      (forall (?t - rtype)
        (forall (?r - receptacle)
          (or
            (not (and (canContain ?t MugType)
                      (receptacleType ?r ?t)))
            (checked ?r)
          )
        )
      )
      (forall (?re - receptacle)
        (not (opened ?re)))
    )
  )
)
)PDDL";

}  // namespace hiprl
