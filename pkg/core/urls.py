"""
URL configuration for core app.
"""
from django.urls import path
from . import views

app_name = "core"

urlpatterns = [
    # Health
    path("health/", views.health_check, name="health"),
    path("health/<str:subpath>/", views.health_check, name="health-subpath"),

    # Complexes
    path("complexes/validate/", views.validate_complex, name="validate-complex"),
    path("complexes/special/", views.special_complex, name="special-complex"),
    path("complexes/hyperplanes/", views.hyperplanes, name="hyperplanes"),
    path("covers/", views.covers, name="covers"),

    # Pipeline and certificates
    path("specialize/", views.specialize, name="specialize"),
    path("certificates/verify/", views.verify_certificate, name="verify-certificate"),
    path("certificates/<str:input_hash>/", views.get_certificate, name="get-certificate"),
]
