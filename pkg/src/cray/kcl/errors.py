#
# MIT License
#
# (C) Copyright 2026 Hewlett Packard Enterprise Development LP
#
# Permission is hereby granted, free of charge, to any person obtaining a
# copy of this software and associated documentation files (the "Software"),
# to deal in the Software without restriction, including without limitation
# the rights to use, copy, modify, merge, publish, distribute, sublicense,
# and/or sell copies of the Software, and to permit persons to whom the
# Software is furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included
# in all copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL
# THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR
# OTHER LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE,
# ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR
# OTHER DEALINGS IN THE SOFTWARE.
#
# Exceptions raised by the kernelized classification layer library


class KclError(Exception):
    pass


class InvalidSeries(KclError):
    """Raised when a kernel series is malformed or evaluated at a non-finite point."""
    pass


class DegenerateVector(KclError):
    """Raised when a vector is too short to be L2-normalized."""
    pass


class InvalidTarget(KclError):
    """Raised for out-of-range labels and malformed teacher distributions."""
    pass


class ShapeMismatch(KclError):
    pass


class NumericalFailure(KclError):
    pass


class NonFiniteLoss(NumericalFailure):
    """
    Raised when training produces a NaN or infinite loss. This is the
    observable for coefficient vectors that leave the positive definite cone.
    """
    def __init__(self, message, epoch=None, step=None):
        super(NonFiniteLoss, self).__init__(message)
        self.epoch = epoch
        self.step = step


class QuadratureFailure(NumericalFailure):
    pass


class EmptyDataset(KclError):
    pass


class BudgetExceeded(KclError):
    pass


class EmptySeedSet(KclError):
    pass


class ConfigError(KclError):
    pass


class PropertySuiteFailure(KclError):
    """Raised by the check command when any property suite fails."""
    def __init__(self, message, report=None):
        super(PropertySuiteFailure, self).__init__(message)
        self.report = report or []


class NonUnitVector(KclError):
    """Raised when a point handed to a Gram matrix is not on the unit sphere."""
    pass
