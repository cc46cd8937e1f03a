from django.contrib import admin

from .models import CertificateRecord


@admin.register(CertificateRecord)
class CertificateRecordAdmin(admin.ModelAdmin):
    list_display = ("datum_name", "input_hash", "gamma_degree", "vertex_degree", "created_at")
    search_fields = ("datum_name", "input_hash")
    readonly_fields = ("certificate_text", "input_text", "statistics", "voltages")
