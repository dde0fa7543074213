"""Bounded model checker for MiniC++, a polymorphic C++ subset.

Pipeline: tokenize/parse -> type check + template monomorphization ->
vtable/vptr object model -> GOTO program -> bounded symbolic execution
to SSA -> SMT bit-vector encoding -> solver -> verdict/counterexample.
"""

__version__ = "0.1.0"
